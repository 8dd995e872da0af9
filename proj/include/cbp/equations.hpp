#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cbp/basis.hpp"
#include "cbp/constraints.hpp"
#include "cbp/errors.hpp"

namespace cbp {

enum class EquationKind { advection, burgers, euler };

/// Flux and wavespeed rules for the supported conservation laws.
///
/// Advection uses either a constant velocity or the solid-body rotation field
/// c(x) = (-2 pi (y - 0.5), 2 pi (x - 0.5)).
struct EquationSet {
  EquationKind kind = EquationKind::advection;
  int dim = 1;
  double gamma = 1.4;
  Coord velocity{1.0, 0.0};
  bool rotation = false;

  static EquationSet advection(Coord c, int dim) { return {EquationKind::advection, dim, 1.4, c, false}; }
  static EquationSet solid_body_rotation() { return {EquationKind::advection, 2, 1.4, {0.0, 0.0}, true}; }
  static EquationSet burgers() { return {EquationKind::burgers, 1, 1.4, {0.0, 0.0}, false}; }
  static EquationSet euler(int dim, double gamma) { return {EquationKind::euler, dim, gamma, {0.0, 0.0}, false}; }

  int num_vars() const { return kind == EquationKind::euler ? dim + 2 : 1; }
  bool scalar() const { return kind != EquationKind::euler; }

  std::string name() const {
    switch (kind) {
      case EquationKind::advection: return rotation ? "advection-rotation" : "advection";
      case EquationKind::burgers: return "burgers";
      case EquationKind::euler: return dim == 1 ? "euler-1d" : "euler-2d";
    }
    return "?";
  }

  Coord advection_velocity(const Coord& x) const {
    if (rotation) return {-2.0 * M_PI * (x[1] - 0.5), 2.0 * M_PI * (x[0] - 0.5)};
    return velocity;
  }

  double pressure(const StateVec& u) const { return euler_pressure(u, gamma, dim); }

  double sound_speed(const StateVec& u) const { return std::sqrt(gamma * pressure(u) / u[0]); }

  /// Physical flux along axis (0 = x, 1 = y) at physical point x.
  StateVec flux(const StateVec& u, const Coord& x, int axis) const {
    StateVec f{};
    switch (kind) {
      case EquationKind::advection: f[0] = advection_velocity(x)[axis] * u[0]; break;
      case EquationKind::burgers: f[0] = 0.5 * u[0] * u[0]; break;
      case EquationKind::euler: {
        const double rho = u[0];
        const double vel = u[1 + axis] / rho;
        const double p = pressure(u);
        f[0] = u[1 + axis];
        for (int k = 0; k < dim; ++k) f[1 + k] = u[1 + k] * vel;
        f[1 + axis] += p;
        f[dim + 1] = (u[dim + 1] + p) * vel;
        break;
      }
    }
    return f;
  }

  StateVec normal_flux(const StateVec& u, const Coord& x, const Coord& n) const {
    StateVec f = flux(u, x, 0);
    if (n[0] != 1.0) {
      for (auto& v : f) v *= n[0];
    }
    if (dim > 1 && n[1] != 0.0) {
      const StateVec fy = flux(u, x, 1);
      for (int c = 0; c < kMaxVars; ++c) f[c] += n[1] * fy[c];
    }
    return f;
  }

  /// Davis-style signal speed |v.n| + a (|c.n| for advection, |u| for Burgers).
  double normal_speed(const StateVec& u, const Coord& x, const Coord& n) const {
    switch (kind) {
      case EquationKind::advection: return std::abs(dot(advection_velocity(x), n));
      case EquationKind::burgers: return std::abs(u[0]) * std::abs(n[0]);
      case EquationKind::euler: {
        double vn = 0.0;
        for (int k = 0; k < dim; ++k) vn += u[1 + k] / u[0] * n[k];
        return std::abs(vn) + sound_speed(u);
      }
    }
    return 0.0;
  }

  // Per-axis signal speed used for time-step control.
  double axis_speed(const StateVec& u, const Coord& x, int axis) const {
    Coord n{0.0, 0.0};
    n[axis] = 1.0;
    return normal_speed(u, x, n);
  }

  bool admissible(const StateVec& u) const {
    if (kind != EquationKind::euler) return std::isfinite(u[0]);
    if (!(u[0] > 0.0)) return false;
    const double p = pressure(u);
    return p > 0.0 && std::isfinite(p);
  }
};

/// Upwind flux for linear advection with normal velocity cn.
inline double upwind_flux(double um, double up, double cn) { return cn >= 0.0 ? cn * um : cn * up; }

/// Rusanov flux 0.5 (F(u-) + F(u+)).n - 0.5 s (u+ - u-), s the larger signal speed.
inline StateVec rusanov_flux(const StateVec& um, const StateVec& up, const Coord& n, const EquationSet& eq,
                             const Coord& x = {0.0, 0.0}) {
  if (eq.kind == EquationKind::euler && (!eq.admissible(um) || !eq.admissible(up))) {
    std::ostringstream os;
    os.precision(17);
    os << "rusanov_flux: inadmissible state at face (rho-=" << um[0] << ", rho+=" << up[0] << ")";
    throw NumericalError(os.str());
  }
  const StateVec fm = eq.normal_flux(um, x, n);
  const StateVec fp = eq.normal_flux(up, x, n);
  const double s = std::max(eq.normal_speed(um, x, n), eq.normal_speed(up, x, n));
  StateVec out{};
  for (int c = 0; c < eq.num_vars(); ++c) out[c] = 0.5 * (fm[c] + fp[c]) - 0.5 * s * (up[c] - um[c]);
  return out;
}

/// Interface flux used by the DG scheme: upwind for advection, Rusanov otherwise.
inline StateVec numerical_flux(const StateVec& um, const StateVec& up, const Coord& n, const EquationSet& eq,
                               const Coord& x) {
  if (eq.kind == EquationKind::advection) {
    StateVec out{};
    out[0] = upwind_flux(um[0], up[0], dot(eq.advection_velocity(x), n));
    return out;
  }
  return rusanov_flux(um, up, n, eq, x);
}

}  // namespace cbp
