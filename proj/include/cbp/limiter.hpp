#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cbp/basis.hpp"
#include "cbp/bounds.hpp"
#include "cbp/constraints.hpp"
#include "cbp/errors.hpp"
#include "cbp/reference.hpp"

namespace cbp {

enum class LimiterMode { none, discrete, continuous };

inline std::string to_string(LimiterMode m) {
  switch (m) {
    case LimiterMode::none: return "none";
    case LimiterMode::discrete: return "discrete";
    case LimiterMode::continuous: return "continuous";
  }
  return "?";
}

struct LimiterConfig {
  LimiterMode mode = LimiterMode::continuous;
  int n_iters = 3;
  double fd_step = 1e-4;
  double eps = 1e-12;
  double beta0 = 0.0;  // <= 0 selects 2/(p+1)
  int max_line_search = 5;
  double armijo_c = 0.5;
  bool multi_start = true;  // also descend from every other sample, not only the best one
  bool screen = true;       // skip the optimizer when an interval bound already certifies g >= 0

  double initial_step(int p) const { return beta0 > 0.0 ? beta0 : 2.0 / (p + 1.0); }
  // Discrete limiting is the continuous path with zero optimizer iterations.
  int effective_iters() const { return mode == LimiterMode::continuous ? n_iters : 0; }
};

/// Modified constraint functional: g/g_mean where g >= 0, g/(g_mean - g) otherwise.
inline double eval_h(double g, double g_mean) {
  return g >= 0.0 ? g / g_mean : g / (g_mean - g);
}

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Centered-difference gradient of a scalar field on the reference element.
template <class Field>
Coord fd_jacobian(Field&& h, const Coord& x, double dx, int dim) {
  Coord J{0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    Coord xp = x, xm = x;
    xp[k] += dx;
    xm[k] -= dx;
    J[k] = (h(xp) - h(xm)) / (2.0 * dx);
  }
  return J;
}

/// Centered-difference Hessian: 3-point diagonal, 4-point cross term.
template <class Field>
Matrix2 fd_hessian(Field&& h, const Coord& x, double dx, int dim) {
  Matrix2 H{};
  const double h0 = h(x);
  for (int k = 0; k < dim; ++k) {
    Coord xp = x, xm = x;
    xp[k] += dx;
    xm[k] -= dx;
    H[k][k] = (h(xp) - 2.0 * h0 + h(xm)) / (dx * dx);
  }
  if (dim == 2) {
    const double hpp = h(Coord{x[0] + dx, x[1] + dx});
    const double hmp = h(Coord{x[0] - dx, x[1] + dx});
    const double hpm = h(Coord{x[0] + dx, x[1] - dx});
    const double hmm = h(Coord{x[0] - dx, x[1] - dx});
    H[0][1] = H[1][0] = (hpp - hmp - hpm + hmm) / (4.0 * dx * dx);
  }
  return H;
}

namespace detail {

// Gradient and Hessian sharing stencil evaluations; h0 = h(x).
template <class Field>
void fd_derivatives(Field&& h, const Coord& x, double h0, double dx, int dim, Coord& J, Matrix2& H) {
  J = {0.0, 0.0};
  H = {};
  for (int k = 0; k < dim; ++k) {
    Coord xp = x, xm = x;
    xp[k] += dx;
    xm[k] -= dx;
    const double fp = h(xp), fm = h(xm);
    J[k] = (fp - fm) / (2.0 * dx);
    H[k][k] = (fp - 2.0 * h0 + fm) / (dx * dx);
  }
  if (dim == 2) {
    const double hpp = h(Coord{x[0] + dx, x[1] + dx});
    const double hmp = h(Coord{x[0] - dx, x[1] + dx});
    const double hpm = h(Coord{x[0] + dx, x[1] - dx});
    const double hmm = h(Coord{x[0] - dx, x[1] - dx});
    H[0][1] = H[1][0] = (hpp - hmp - hpm + hmm) / (4.0 * dx * dx);
  }
}

// det(H) > eps and H positive semi-definite (trace > 0 for 2x2 with det > 0).
inline bool newton_admissible(const Matrix2& H, int dim, double eps) {
  if (dim == 1) return H[0][0] > eps;
  const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
  return det > eps && H[0][0] + H[1][1] > 0.0;
}

inline Coord newton_step(const Matrix2& H, const Coord& J, int dim) {
  if (dim == 1) return {-J[0] / H[0][0], 0.0};
  const double det = H[0][0] * H[1][1] - H[0][1] * H[1][0];
  return {-(H[1][1] * J[0] - H[0][1] * J[1]) / det, -(-H[1][0] * J[0] + H[0][0] * J[1]) / det};
}

}  // namespace detail

struct OptimizeResult {
  double h_sample_min = 0.0;  // minimum of h over the initial sample set
  double h_star = 0.0;        // minimum over every evaluated admissible point
  double delta_h = 0.0;       // tolerance correction
  double h_corrected = 0.0;   // max(-1, h_star - delta_h)
  Coord x_sample{};
  Coord x_star{};
  Coord x_final{};
  int iterations = 0;
  int newton_steps = 0;
  int gradient_steps = 0;
  int evaluations = 0;
};

/// Bounded minimization of h over the reference element.
///
/// Starts at the sample-set minimizer and runs `n_iters` projected
/// Newton-Raphson / normalized gradient-descent iterations with backtracking.
/// With multi_start the same search is repeated from every other sample and
/// the run reaching the lowest value supplies the correction. The returned
/// h_corrected is intended as a lower bound of min h.
inline OptimizeResult optimize_h(const ModalSolution& modal, const ConstraintFunctional& g, double g_mean,
                                 const Basis& basis, std::span<const Coord> samples, const LimiterConfig& cfg,
                                 int n_iters) {
  if (!(g_mean >= cfg.eps))
    throw UsageError("optimize_h: g(mean) below tolerance; use the alpha = 1 edge case");
  if (samples.empty()) throw UsageError("optimize_h: empty sample set");
  const auto& elem = basis.element;
  const int dim = elem.dim;
  OptimizeResult r;
  // Linear g is evaluated on the fluctuation about the mean. For a nearly
  // constant element sitting on a bound, g(u) would otherwise lose most of its
  // digits to cancellation and the finite-difference derivatives turn to noise.
  const bool linear = g.is_linear && !g.custom;
  ModalSolution fluct = modal;
  if (linear) {
    const StateVec mean = element_mean(modal, basis);
    for (int c = 0; c < fluct.ncomp; ++c) fluct(c, 0) -= mean[c];
  }
  auto h = [&](const Coord& x) {
    ++r.evaluations;
    if (linear) {
      const StateVec du = modal_evaluate(fluct, basis.modal, x);
      return eval_h(g_mean + g.sign * g.measure(std::span<const double>(du.data(), du.size())), g_mean);
    }
    const StateVec u = modal_evaluate(modal, basis.modal, x);
    return eval_h(g(u), g_mean);
  };

  r.h_sample_min = std::numeric_limits<double>::infinity();
  std::vector<double> hs(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    hs[i] = h(samples[i]);
    if (hs[i] < r.h_sample_min) {
      r.h_sample_min = hs[i];
      r.x_sample = samples[i];
    }
  }
  r.h_star = r.h_sample_min;
  r.x_star = r.x_sample;
  auto record = [&](const Coord& x, double v) {
    if (v < r.h_star) {
      r.h_star = v;
      r.x_star = x;
    }
  };
  const double beta0 = cfg.initial_step(basis.order());

  // One projected Newton / gradient-descent run from x. Returns the run's own
  // minimum; its final point and last-step correction go to `end`/`dh`.
  auto descend = [&](Coord x, double hcur, Coord& end, double& dh) {
    double run_min = hcur;
    Coord last_step{0.0, 0.0};
    double last_grad = 0.0;
    for (int it = 0; it < n_iters; ++it) {
      Coord J;
      Matrix2 H;
      detail::fd_derivatives(h, x, hcur, cfg.fd_step, dim, J, H);
      // Faces the descent direction pushes against stay fixed and the search
      // continues in what is left: along the edge, or nowhere at a corner.
      Coord gred = J;
      int held = 0;
      Coord tangent{0.0, 0.0};
      for (int fi : active_faces(elem, x)) {
        const Coord& nrm = elem.faces[fi].normal;
        const double nd = dot(nrm, gred);
        if (nd >= 0.0) continue;
        gred = gred - nd * nrm;
        tangent = {-nrm[1], nrm[0]};
        ++held;
      }
      if (held >= dim) gred = {0.0, 0.0};
      const double gnorm = norm2(gred);
      Coord step{0.0, 0.0};
      double hnext = hcur;
      const double curv = held == 1 ? dot(tangent, Coord{dot(H[0], tangent), dot(H[1], tangent)}) : 0.0;
      if (held == 1 && gnorm > 0.0 && curv > cfg.eps) {
        step = project_step(elem, x, (-dot(J, tangent) / curv) * tangent);
        hnext = h(x + step);
        record(x + step, hnext);
        run_min = std::min(run_min, hnext);
        ++r.newton_steps;
      } else if (held == 0 && detail::newton_admissible(H, dim, cfg.eps)) {
        step = project_step(elem, x, detail::newton_step(H, J, dim));
        hnext = h(x + step);
        record(x + step, hnext);
        run_min = std::min(run_min, hnext);
        ++r.newton_steps;
      } else if (gnorm > 0.0) {
        const Coord dir = (-1.0 / gnorm) * gred;
        double beta = beta0;
        for (int k = 0; k <= cfg.max_line_search; ++k) {
          step = project_step(elem, x, beta * dir);
          hnext = h(x + step);
          record(x + step, hnext);
          run_min = std::min(run_min, hnext);
          if (hnext <= hcur - cfg.armijo_c * beta * gnorm) break;
          beta *= 0.5;
        }
        ++r.gradient_steps;
      }
      last_step = step;
      last_grad = gnorm;
      x = x + step;
      hcur = hnext;
    }
    end = x;
    dh = last_grad * norm2(last_step);
    return run_min;
  };

  double best = descend(r.x_sample, r.h_sample_min, r.x_final, r.delta_h);
  r.iterations = n_iters;
  // Extra starts from the remaining samples catch minima that sit between
  // nodes in a basin other than the best node's. The run reaching the lowest
  // value supplies the final point and the tolerance correction.
  if (cfg.multi_start && n_iters > 0) {
    bool moved = false;
    for (size_t i = 0; i < samples.size(); ++i) {
      if (samples[i] == r.x_sample) continue;
      Coord end;
      double dh = 0.0;
      const double v = descend(samples[i], hs[i], end, dh);
      if (v < best) {
        best = v;
        moved = true;
      }
    }
    // A better basin was found by a secondary start: refine from the best
    // point so the correction reflects a settled iterate.
    if (moved) descend(r.x_star, r.h_star, r.x_final, r.delta_h);
  }
  r.h_corrected = std::max(-1.0, r.h_star - r.delta_h);
  return r;
}

inline OptimizeResult optimize_h(const ModalSolution& modal, const ConstraintFunctional& g, double g_mean,
                                 const Basis& basis, std::span<const Coord> samples, const LimiterConfig& cfg) {
  return optimize_h(modal, g, g_mean, basis, samples, cfg, cfg.effective_iters());
}

/// Zhang-Shu style factor from nodal constraint values.
inline double discrete_alpha(std::span<const double> g_nodes, double g_mean) {
  if (g_nodes.empty()) throw UsageError("discrete_alpha: empty node set");
  const double gs = *std::min_element(g_nodes.begin(), g_nodes.end());
  if (gs >= 0.0) return 0.0;
  return std::max(0.0, gs / (gs - g_mean));
}

/// (1 - alpha) u + alpha * mean, applied in monomial coefficient space.
inline ModalSolution apply_limit(const ModalSolution& u, const StateVec& mean, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("apply_limit: alpha outside [0,1]");
  ModalSolution out = u;
  if (alpha == 0.0) return out;
  const double keep = 1.0 - alpha;
  for (auto& c : out.coeffs) c *= keep;
  // Mode 0 is the constant monomial.
  for (int c = 0; c < out.ncomp; ++c) out(c, 0) += alpha * mean[c];
  return out;
}

struct ConstraintRecord {
  int constraint = 0;  // index into the ConstraintSet
  double g_mean = 0.0;
  double alpha = 0.0;
  double alpha_discrete = 0.0;
  double h_star = 0.0;
  double h_corrected = 0.0;
  double delta_h = 0.0;
  Coord x_star{};
  int iterations = 0;
  bool gradient_fallback = false;
  bool degenerate_mean = false;  // g(mean) < eps, alpha forced to 1
  bool screened = false;         // certified admissible by interval bounds, optimizer skipped
};

struct LimiterReport {
  int element = -1;
  double alpha = 0.0;  // combined contraction applied to the element
  std::vector<ConstraintRecord> records;
};

inline std::string describe_mean_failure(int element, const ConstraintFunctional& g, double gm) {
  std::ostringstream os;
  os.precision(17);
  os << "limiter: element " << element << " has inadmissible mean for constraint '" << g.id << "' (g(mean) = " << gm
     << ")";
  return os.str();
}

namespace detail {

// Relative slack a certified bound must clear before the optimizer is skipped.
inline constexpr double kScreenMargin = 1e-8;

// Certified lower bound of g over the whole element, or -inf when none is
// available (triangles, custom rules, pressure with a density range touching 0).
// Linear g is bounded through the fluctuation about the mean so elements
// sitting near a bound do not lose the margin to cancellation.
inline double certified_g_lower(const ModalSolution& u, const StateVec& mean, const ConstraintFunctional& g,
                                double gm, const Basis& basis) {
  constexpr double none = -std::numeric_limits<double>::infinity();
  if (basis.element.kind == ElementKind::triangle || g.custom) return none;
  const Box full{{-1.0, -1.0}, {1.0, 1.0}};
  if (g.is_linear) {
    const int c = g.measure.kind == Measure::Kind::density ? 0 : g.measure.component;
    ModalSolution d(1, u.nmodes);
    for (int i = 0; i < u.nmodes; ++i) d(0, i) = u(c, i);
    d(0, 0) -= mean[c];
    const auto [lo, hi] = monomial_bounds(d, basis.modal, full)[0];
    return gm + (g.sign >= 0.0 ? g.sign * lo : g.sign * hi);
  }
  if (g.measure.kind != Measure::Kind::pressure) return none;
  const auto b = monomial_bounds(u, basis.modal, full);
  if (!(b[0].first > 0.0)) return none;
  return concave_g_bound(b, g);
}

inline ConstraintRecord limit_one(const ModalSolution& u, const StateVec& mean, const ConstraintFunctional& g,
                                  const Basis& basis, std::span<const Coord> samples, const LimiterConfig& cfg) {
  ConstraintRecord rec;
  const double gm = g(mean);
  rec.g_mean = gm;
  if (gm < -cfg.eps) throw NumericalError(describe_mean_failure(u.element, g, gm));
  if (gm < cfg.eps) {
    rec.alpha = 1.0;
    rec.alpha_discrete = 1.0;
    rec.h_star = rec.h_corrected = -1.0;
    rec.degenerate_mean = true;
    return rec;
  }
  if (cfg.screen && cfg.mode == LimiterMode::continuous) {
    const double lb = certified_g_lower(u, mean, g, gm, basis);
    if (lb >= kScreenMargin * gm) {
      std::array<double, 128> gvals{};
      const int n = static_cast<int>(std::min<size_t>(samples.size(), gvals.size()));
      for (int i = 0; i < n; ++i) gvals[i] = g(modal_evaluate(u, basis.modal, samples[i]));
      rec.alpha_discrete = discrete_alpha(std::span<const double>(gvals.data(), n), gm);
      rec.h_star = rec.h_corrected = eval_h(lb, gm);
      rec.screened = true;
      return rec;
    }
  }

  const OptimizeResult opt = optimize_h(u, g, gm, basis, samples, cfg);
  // The optimizer's sample pass is the node-only limiter. Taking the discrete
  // factor from those same h values keeps alpha >= alpha_discrete exact: with
  // g_mean near zero, h amplifies rounding differences between two separate
  // evaluations of g at the nodes.
  rec.alpha_discrete = std::max(0.0, -opt.h_sample_min);
  rec.h_star = opt.h_star;
  rec.h_corrected = opt.h_corrected;
  rec.delta_h = opt.delta_h;
  rec.x_star = opt.x_star;
  rec.iterations = opt.iterations;
  rec.gradient_fallback = opt.gradient_steps > 0;
  rec.alpha = std::max(0.0, -opt.h_corrected);
  return rec;
}

}  // namespace detail

/// Limit one element against a constraint set.
///
/// Sequential mode limits constraint by constraint, feeding each result into
/// the next; independent mode applies the largest factor once. The mean of
/// every constraint must be admissible (g(mean) >= -eps); otherwise this
/// throws NumericalError naming the element and constraint.
inline ModalSolution limit_element(const ModalSolution& u, const ConstraintSet& set, const Basis& basis,
                                   std::span<const Coord> samples, const LimiterConfig& cfg,
                                   LimiterReport* report = nullptr) {
  LimiterReport local;
  LimiterReport& rep = report ? *report : local;
  rep.element = u.element;
  rep.alpha = 0.0;
  rep.records.clear();
  if (cfg.mode == LimiterMode::none || set.size() == 0) return u;

  const StateVec mean = element_mean(u, basis);
  if (set.mode == ApplicationMode::sequential) {
    ModalSolution cur = u;
    double keep = 1.0;
    for (int k = 0; k < set.size(); ++k) {
      ConstraintRecord rec = detail::limit_one(cur, mean, set[k], basis, samples, cfg);
      rec.constraint = k;
      if (rec.alpha > 0.0) cur = apply_limit(cur, mean, rec.alpha);
      keep *= 1.0 - rec.alpha;
      rep.records.push_back(std::move(rec));
    }
    rep.alpha = 1.0 - keep;
    return cur;
  }
  double alpha = 0.0;
  for (int k = 0; k < set.size(); ++k) {
    ConstraintRecord rec = detail::limit_one(u, mean, set[k], basis, samples, cfg);
    rec.constraint = k;
    alpha = std::max(alpha, rec.alpha);
    rep.records.push_back(std::move(rec));
  }
  rep.alpha = alpha;
  return alpha > 0.0 ? apply_limit(u, mean, alpha) : u;
}

inline ModalSolution limit_element(const ModalSolution& u, const ConstraintSet& set, const Basis& basis,
                                   const LimiterConfig& cfg, LimiterReport* report = nullptr) {
  return limit_element(u, set, basis, basis.nodal.nodes, cfg, report);
}

}  // namespace cbp
