#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cbp/basis.hpp"
#include "cbp/bounds.hpp"
#include "cbp/constraints.hpp"
#include "cbp/discretization.hpp"
#include "cbp/errors.hpp"
#include "cbp/parallel.hpp"
#include "cbp/reference.hpp"

namespace cbp {

/// Equispaced audit points per dimension, endpoints included. Triangles keep
/// the lattice points inside the reference triangle.
inline std::vector<Coord> oversample_points(ElementKind kind, int per_dim) {
  if (per_dim < 2) throw UsageError("oversampling needs at least 2 points per dimension");
  std::vector<Coord> pts;
  const double h = 2.0 / (per_dim - 1);
  if (kind == ElementKind::segment) {
    for (int i = 0; i < per_dim; ++i) pts.push_back({-1.0 + h * i, 0.0});
  } else {
    for (int j = 0; j < per_dim; ++j)
      for (int i = 0; i < per_dim; ++i)
        if (kind == ElementKind::quad || i + j <= per_dim - 1) pts.push_back({-1.0 + h * i, -1.0 + h * j});
  }
  return pts;
}

/// Precomputed monomial values at the audit points.
struct Sampler {
  std::vector<Coord> points;
  Eigen::MatrixXd psi;  // points x modes

  static Sampler make(const Basis& basis, int per_dim) {
    Sampler s;
    s.points = oversample_points(basis.element.kind, per_dim);
    s.psi.resize(static_cast<Eigen::Index>(s.points.size()), basis.size());
    std::vector<double> row(basis.size());
    for (size_t k = 0; k < s.points.size(); ++k) {
      basis.modal.evaluate(s.points[k], row);
      for (int j = 0; j < basis.size(); ++j) s.psi(static_cast<Eigen::Index>(k), j) = row[j];
    }
    return s;
  }
};

struct ConstraintMin {
  double value = std::numeric_limits<double>::infinity();
  int element = -1;
  Coord x{};
};

/// Constraint minima over all elements, per constraint.
struct AuditEntry {
  double time = 0.0;
  std::vector<ConstraintMin> per_constraint;
  double overall = std::numeric_limits<double>::infinity();  // minimum of the per-constraint minima
};

/// Audit time series with a running spatio-temporal minimum.
struct AuditRecord {
  std::vector<AuditEntry> entries;
  std::vector<ConstraintMin> running;
  double running_overall = std::numeric_limits<double>::infinity();

  void add(const AuditEntry& a) {
    if (running.size() < a.per_constraint.size()) running.resize(a.per_constraint.size());
    for (size_t k = 0; k < a.per_constraint.size(); ++k)
      if (a.per_constraint[k].value < running[k].value) running[k] = a.per_constraint[k];
    running_overall = std::min(running_overall, a.overall);
    entries.push_back(a);
  }
};

/// Minimum of each constraint over the audit points of one modal solution.
inline std::vector<ConstraintMin> oversample_element(const ModalSolution& u, const ConstraintSet& set,
                                                     const Sampler& s) {
  Eigen::Map<const Eigen::MatrixXd> coeffs(u.coeffs.data(), u.nmodes, u.ncomp);
  const Eigen::MatrixXd vals = s.psi * coeffs;
  std::vector<ConstraintMin> out(set.size());
  StateVec st{};
  for (Eigen::Index k = 0; k < vals.rows(); ++k) {
    for (int c = 0; c < u.ncomp; ++c) st[c] = vals(k, c);
    for (int q = 0; q < set.size(); ++q) {
      double g = set[q](st);
      if (std::isnan(g)) g = -std::numeric_limits<double>::infinity();
      if (g < out[q].value) out[q] = {g, u.element, s.points[static_cast<size_t>(k)]};
    }
  }
  return out;
}

/// Oversampled constraint minima of a nodal state over the whole mesh.
inline AuditEntry oversample_min(const Discretization& d, std::span<const double> u, const ConstraintSet& set,
                                 const Sampler& s, double time = 0.0) {
  const int ne = d.num_elements();
  std::vector<std::vector<ConstraintMin>> per(ne);
  const size_t len = static_cast<size_t>(d.nodes) * d.m;
  parallel_for(ne, [&](int e) {
    const ModalSolution modal = nodal_to_modal(u.subspan(d.node_slot(e, 0), len), d.m, d.basis, e);
    per[e] = oversample_element(modal, set, s);
  });
  AuditEntry a;
  a.time = time;
  a.per_constraint.resize(set.size());
  for (int e = 0; e < ne; ++e)
    for (int q = 0; q < set.size(); ++q) {
      const auto& c = per[e][q];
      if (c.value < a.per_constraint[q].value) a.per_constraint[q] = c;
    }
  for (const auto& c : a.per_constraint) a.overall = std::min(a.overall, c.value);
  return a;
}

inline AuditEntry oversample_min(const Discretization& d, std::span<const double> u, const ConstraintSet& set,
                                 int per_dim = 100, double time = 0.0) {
  return oversample_min(d, u, set, Sampler::make(d.basis, per_dim), time);
}

enum class Norm { l1, linf };

inline std::string to_string(Norm n) { return n == Norm::l1 ? "L1" : "Linf"; }

using ExactSolution = std::function<StateVec(const Coord& x, double t)>;

/// L1 (GL quadrature at the solution nodes) or Linf (max over nodes) error of one component.
inline double lp_error(const Discretization& d, std::span<const double> u, const ExactSolution& exact, double t,
                       Norm norm, int component = 0) {
  if (component < 0 || component >= d.m) throw UsageError("lp_error: component out of range");
  double acc = 0.0;
  for (int e = 0; e < d.num_elements(); ++e) {
    double local = 0.0;
    for (int i = 0; i < d.nodes; ++i) {
      const double err = std::abs(u[d.node_slot(e, i) + component] -
                                  exact(d.xnodes[static_cast<size_t>(e) * d.nodes + i], t)[component]);
      if (norm == Norm::l1)
        local += d.node_weight(i) * err;
      else
        local = std::max(local, err);
    }
    acc = norm == Norm::l1 ? acc + local * d.mesh.volume() : std::max(acc, local);
  }
  return acc;
}

enum class RateMethod { least_squares, last_pair };

/// Observed order: slope of log(error) against log(1/N).
inline double rate_of_convergence(std::span<const double> errors, std::span<const double> ns,
                                  RateMethod method = RateMethod::least_squares) {
  if (errors.size() != ns.size() || errors.size() < 2)
    throw UsageError("rate_of_convergence needs at least two (N, error) pairs");
  for (size_t k = 0; k < errors.size(); ++k)
    if (!(errors[k] > 0.0) || !(ns[k] > 0.0))
      throw UsageError("rate_of_convergence: errors and N must be positive (entry " + std::to_string(k) + ")");
  if (method == RateMethod::last_pair) {
    const size_t a = errors.size() - 2, b = errors.size() - 1;
    return std::log(errors[b] / errors[a]) / std::log(ns[a] / ns[b]);
  }
  const size_t n = errors.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double x = -std::log(ns[k]), y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cbp
