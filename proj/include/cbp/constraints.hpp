#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbp/basis.hpp"
#include "cbp/errors.hpp"

namespace cbp {

/// Euler pressure (gamma-1)(E - |m|^2 / (2 rho)) for u = (rho, m_1..m_d, E).
inline double euler_pressure(std::span<const double> u, double gamma, int ndim) {
  const double rho = u[0];
  if (rho == 0.0) throw NumericalError("euler_pressure: zero density");
  double mm = 0.0;
  for (int k = 1; k <= ndim; ++k) mm += u[k] * u[k];
  return (gamma - 1.0) * (u[ndim + 1] - 0.5 * mm / rho);
}

inline double euler_pressure(const StateVec& u, double gamma, int ndim) {
  return euler_pressure(std::span<const double>(u.data(), ndim + 2), gamma, ndim);
}

/// Scalar functional of the state that bounds are imposed on.
struct Measure {
  enum class Kind { component, density, pressure };
  Kind kind = Kind::component;
  int component = 0;
  double gamma = 1.4;
  int ndim = 1;

  static Measure of_component(int c) { return {Kind::component, c, 1.4, 1}; }
  static Measure density() { return {Kind::density, 0, 1.4, 1}; }
  static Measure pressure(double gamma, int ndim) { return {Kind::pressure, 0, gamma, ndim}; }

  bool linear() const { return kind != Kind::pressure; }

  double operator()(std::span<const double> u) const {
    switch (kind) {
      case Kind::component: return u[component];
      case Kind::density: return u[0];
      case Kind::pressure: return euler_pressure(u, gamma, ndim);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind) {
      case Kind::component: return "u" + std::to_string(component);
      case Kind::density: return "density";
      case Kind::pressure: return "pressure";
    }
    return "?";
  }
};

/// Quasiconcave constraint g(u) >= 0, either sign * mu(u) + shift or a custom rule.
struct ConstraintFunctional {
  std::string id;
  Measure measure;
  double sign = 1.0;
  double shift = 0.0;
  bool is_linear = true;
  int position = 0;
  std::function<double(std::span<const double>)> custom;

  double operator()(std::span<const double> u) const {
    if (custom) return custom(u);
    return sign * measure(u) + shift;
  }
  double operator()(const StateVec& u) const { return (*this)(std::span<const double>(u.data(), u.size())); }
};

enum class ApplicationMode { independent_max, sequential };

struct ConstraintSet {
  std::vector<ConstraintFunctional> constraints;
  ApplicationMode mode = ApplicationMode::independent_max;

  int size() const { return static_cast<int>(constraints.size()); }
  const ConstraintFunctional& operator[](int i) const { return constraints[i]; }
};

inline ConstraintFunctional custom_constraint(std::string id, std::function<double(std::span<const double>)> g,
                                              bool linear) {
  ConstraintFunctional f;
  f.id = std::move(id);
  f.custom = std::move(g);
  f.is_linear = linear;
  return f;
}

/// g(u) = mu(u) - c.
inline ConstraintFunctional min_principle(const Measure& mu, double c) {
  ConstraintFunctional g;
  g.id = mu.name() + ">=" + std::to_string(c);
  g.measure = mu;
  g.sign = 1.0;
  g.shift = -c;
  g.is_linear = mu.linear();
  return g;
}

/// (g1, g2) = (mu - a, b - mu).
inline std::pair<ConstraintFunctional, ConstraintFunctional> interval_bounds(const Measure& mu, double a, double b) {
  if (!(b > a)) throw ConfigError("interval_bounds requires b > a");
  ConstraintFunctional lo = min_principle(mu, a);
  ConstraintFunctional hi;
  hi.id = mu.name() + "<=" + std::to_string(b);
  hi.measure = mu;
  hi.sign = -1.0;
  hi.shift = b;
  hi.is_linear = mu.linear();
  hi.position = 1;
  return {lo, hi};
}

inline ConstraintSet scalar_bounds_set(double a, double b) {
  auto [lo, hi] = interval_bounds(Measure::of_component(0), a, b);
  ConstraintSet set;
  set.constraints = {lo, hi};
  set.mode = ApplicationMode::independent_max;
  return set;
}

inline constexpr double kEulerMinBound = 1e-11;

/// Density then pressure, limited sequentially.
inline ConstraintSet euler_positivity_set(double rho_min, double p_min, double gamma, int ndim = 1) {
  if (!(rho_min > 0.0 && p_min > 0.0)) throw ConfigError("euler positivity bounds must be positive");
  ConstraintSet set;
  auto rho = min_principle(Measure::density(), rho_min);
  auto prs = min_principle(Measure::pressure(gamma, ndim), p_min);
  rho.position = 0;
  prs.position = 1;
  set.constraints = {rho, prs};
  set.mode = ApplicationMode::sequential;
  return set;
}

}  // namespace cbp
