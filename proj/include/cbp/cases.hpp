#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cbp/constraints.hpp"
#include "cbp/equations.hpp"
#include "cbp/errors.hpp"
#include "cbp/mesh.hpp"
#include "cbp/solver.hpp"
#include "cbp/verify.hpp"

namespace cbp {

enum class AuditCadence { every_step, final_only };

inline std::string to_string(AuditCadence a) { return a == AuditCadence::every_step ? "every" : "final"; }

struct CaseDefinition {
  std::string name;
  EquationSet equation;
  ElementKind kind = ElementKind::segment;
  Coord lo{0.0, 0.0};
  Coord hi{1.0, 0.0};
  BoundaryKind boundary = BoundaryKind::periodic;
  InitialCondition initial;
  std::optional<ExactSolution> exact;
  ConstraintSet constraints;
  int order = 2;
  int nelems = 20;  // per axis
  double t_final = 1.0;
  double cfl = 0.5;
  bool stabilizer = false;
  AuditCadence audit = AuditCadence::every_step;
  Norm norm = Norm::l1;
  int norm_component = 0;
  std::vector<int> convergence_n;

  Mesh build_mesh(int n) const {
    if (kind == ElementKind::segment) return build_interval_mesh(n, lo[0], hi[0], boundary);
    return build_cartesian_mesh(n, n, lo, hi, boundary);
  }
};

namespace cases {

inline double wrap(double x, double lo, double hi) {
  const double L = hi - lo;
  double r = std::fmod(x - lo, L);
  if (r < 0.0) r += L;
  return lo + r;
}

// Closed intervals, widened by a hair so that nodes placed on a jump by the
// mesh see the same side for every N despite rounding in the node coordinate.
inline constexpr double kEdgeTol = 1e-12;

inline double waveforms(double x) {
  if (std::abs(2.0 * x - 0.3) <= 0.25 + kEdgeTol) return std::exp(-300.0 * (2.0 * x - 0.3) * (2.0 * x - 0.3));
  if (std::abs(2.0 * x - 0.9) <= 0.2 + kEdgeTol) return 1.0;
  if (std::abs(2.0 * x - 1.6) <= 0.2 + kEdgeTol) {
    const double r = (2.0 * x - 1.6) / 0.2;
    return std::sqrt(std::max(0.0, 1.0 - r * r));
  }
  return 0.0;
}

inline double rotation_profile(double x, double y) {
  const double rc = std::hypot(x - 0.5, y - 0.75);
  if (rc <= 0.15 && !(x >= 0.475 && x <= 0.525 && y >= 0.6 && y <= 0.85)) return 1.0;
  const double rh = std::hypot(x - 0.25, y - 0.5);
  if (rh <= 0.15) return 0.25 * (1.0 + std::cos(M_PI / 0.15 * rh));
  const double rk = std::hypot(x - 0.5, y - 0.25);
  if (rk <= 0.15) return 1.0 - rk / 0.15;
  return 0.0;
}

inline StateVec euler_state_1d(double rho, double v, double p, double gamma) {
  return {rho, rho * v, p / (gamma - 1.0) + 0.5 * rho * v * v, 0.0};
}

inline StateVec scalar(double v) { return {v, 0.0, 0.0, 0.0}; }

inline CaseDefinition advect_waveforms() {
  CaseDefinition c;
  c.name = "advect-waveforms";
  c.equation = EquationSet::advection({1.0, 0.0}, 1);
  c.lo = {0.0, 0.0};
  c.hi = {1.0, 0.0};
  c.initial = [](const Coord& x, const Mesh&, int) { return scalar(waveforms(x[0])); };
  c.exact = [](const Coord& x, double t) { return scalar(waveforms(wrap(x[0] - t, 0.0, 1.0))); };
  c.constraints = scalar_bounds_set(0.0, 1.0);
  c.order = 2;
  c.nelems = 20;
  c.t_final = 1.0;
  c.convergence_n = {20, 40, 60, 80, 100, 120};
  return c;
}

inline CaseDefinition solid_body_rotation() {
  CaseDefinition c;
  c.name = "solid-body-rotation";
  c.equation = EquationSet::solid_body_rotation();
  c.kind = ElementKind::quad;
  c.lo = {0.0, 0.0};
  c.hi = {1.0, 1.0};
  c.initial = [](const Coord& x, const Mesh&, int) { return scalar(rotation_profile(x[0], x[1])); };
  c.exact = [](const Coord& x, double t) {
    // Rotate back by the angle swept since t = 0.
    const double th = -2.0 * M_PI * t;
    const double dx = x[0] - 0.5, dy = x[1] - 0.5;
    return scalar(rotation_profile(0.5 + std::cos(th) * dx - std::sin(th) * dy,
                                   0.5 + std::sin(th) * dx + std::cos(th) * dy));
  };
  c.constraints = scalar_bounds_set(0.0, 1.0);
  c.order = 2;
  c.nelems = 32;
  c.t_final = 1.0;
  c.audit = AuditCadence::final_only;
  c.convergence_n = {16, 32, 64};
  return c;
}

inline CaseDefinition burgers_compression() {
  CaseDefinition c;
  c.name = "burgers-compression";
  c.equation = EquationSet::burgers();
  c.lo = {0.0, 0.0};
  c.hi = {1.0, 0.0};
  c.initial = [](const Coord& x, const Mesh&, int) { return scalar(std::max(1.0 - 2.0 * x[0], 2.0 * x[0] - 1.0)); };
  c.constraints = scalar_bounds_set(0.0, 1.0);
  c.order = 3;
  c.nelems = 24;
  c.t_final = 0.5;
  return c;
}

inline constexpr double kPulseGamma = 1.4;

inline CaseDefinition euler_pulse() {
  CaseDefinition c;
  c.name = "euler-pulse";
  c.equation = EquationSet::euler(1, kPulseGamma);
  c.lo = {-0.5, 0.0};
  c.hi = {0.5, 0.0};
  auto rho = [](double x) { return std::exp(-200.0 * x * x) + 2.0 * kEulerMinBound; };
  c.initial = [rho](const Coord& x, const Mesh&, int) {
    return euler_state_1d(rho(x[0]), 1.0, 2.0 * kEulerMinBound, kPulseGamma);
  };
  c.exact = [rho](const Coord& x, double t) {
    return euler_state_1d(rho(wrap(x[0] - t, -0.5, 0.5)), 1.0, 2.0 * kEulerMinBound, kPulseGamma);
  };
  c.constraints = euler_positivity_set(kEulerMinBound, kEulerMinBound, kPulseGamma, 1);
  c.order = 2;
  c.nelems = 20;
  c.t_final = 1.0;
  c.norm = Norm::linf;
  c.convergence_n = {10, 15, 20, 25, 30, 35, 40};
  return c;
}

inline CaseDefinition leblanc() {
  const double gamma = 5.0 / 3.0;
  CaseDefinition c;
  c.name = "leblanc";
  c.equation = EquationSet::euler(1, gamma);
  c.lo = {0.0, 0.0};
  c.hi = {9.0, 0.0};
  c.boundary = BoundaryKind::dirichlet;
  c.initial = [gamma](const Coord& x, const Mesh&, int) {
    if (x[0] <= 3.0) return euler_state_1d(1.0, 0.0, (gamma - 1.0) * 1e-1, gamma);
    return euler_state_1d(1e-3, 0.0, (gamma - 1.0) * 1e-10, gamma);
  };
  c.constraints = euler_positivity_set(kEulerMinBound, kEulerMinBound, gamma, 1);
  c.order = 3;
  c.nelems = 1200;
  c.t_final = 6.0;
  c.stabilizer = true;
  c.audit = AuditCadence::final_only;
  return c;
}

inline constexpr double kSedovEnergy = 0.244816;

inline CaseDefinition sedov() {
  const double gamma = 1.4;
  CaseDefinition c;
  c.name = "sedov";
  c.equation = EquationSet::euler(2, gamma);
  c.kind = ElementKind::quad;
  c.lo = {-1.2, -1.2};
  c.hi = {1.2, 1.2};
  c.initial = [gamma](const Coord&, const Mesh& mesh, int e) {
    if (mesh.nx % 2 == 0 || mesh.ny % 2 == 0)
      throw ConfigError("sedov needs an odd number of elements per axis so one element is centered at the origin");
    const double rho0 = 1.0;
    double p = 1e-6;
    if (e == mesh.index(mesh.nx / 2, mesh.ny / 2)) p = 4.0 * (gamma - 1.0) * rho0 * kSedovEnergy / mesh.volume();
    return StateVec{rho0, 0.0, 0.0, p / (gamma - 1.0)};
  };
  c.constraints = euler_positivity_set(kEulerMinBound, kEulerMinBound, gamma, 2);
  c.order = 2;
  c.nelems = 65;
  c.t_final = 1.0;
  c.stabilizer = true;
  c.audit = AuditCadence::final_only;
  return c;
}

}  // namespace cases

inline std::vector<std::string> case_names() {
  return {"advect-waveforms", "solid-body-rotation", "burgers-compression", "euler-pulse", "leblanc", "sedov"};
}

inline CaseDefinition get_case(const std::string& name) {
  if (name == "advect-waveforms") return cases::advect_waveforms();
  if (name == "solid-body-rotation") return cases::solid_body_rotation();
  if (name == "burgers-compression") return cases::burgers_compression();
  if (name == "euler-pulse") return cases::euler_pulse();
  if (name == "leblanc") return cases::leblanc();
  if (name == "sedov") return cases::sedov();
  std::string known;
  for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown case '" + name + "' (known: " + known + ")");
}

}  // namespace cbp
