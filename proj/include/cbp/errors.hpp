#pragma once

#include <stdexcept>
#include <string>

namespace cbp {

// Bad input supplied by a caller (wrong dimension, out-of-range argument).
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Invalid user configuration (unknown case, unsupported order, bad config key).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: singular transforms, inadmissible states, limiter
// precondition violations. Maps to exit status 2 in the CLI.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cbp
