#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

#include "cbp/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbp {

inline constexpr const char* kThreadsEnv = "CBP_NUM_THREADS";

inline int available_parallelism() {
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

/// Worker count from CBP_NUM_THREADS (integer >= 1), else available parallelism.
inline int configured_workers() {
  const char* env = std::getenv(kThreadsEnv);
  if (!env || !*env) return available_parallelism();
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096)
    throw ConfigError(std::string(kThreadsEnv) + " must be an integer >= 1, got '" + env + "'");
  return static_cast<int>(v);
}

inline void set_workers(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n < 1 ? 1 : n);
#else
  (void)n;
#endif
}

/// Runs f(i) for i in [0, n) across OpenMP threads. The first exception thrown
/// by any iteration is rethrown on the calling thread once the loop finishes.
template <class F>
void parallel_for(int n, F&& f) {
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    if (err) continue;
    try {
      f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace cbp
