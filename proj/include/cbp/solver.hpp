#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cbp/constraints.hpp"
#include "cbp/discretization.hpp"
#include "cbp/equations.hpp"
#include "cbp/errors.hpp"
#include "cbp/limiter.hpp"
#include "cbp/parallel.hpp"
#include "cbp/stabilize.hpp"

namespace cbp {

struct SimulationState {
  std::vector<double> u;  // [(e * nodes + i) * m + c]
  double t = 0.0;
  long step = 0;
};

/// Initial condition rule. The element index lets cases set element-wise data
/// (the Sedov energy deposit).
using InitialCondition = std::function<StateVec(const Coord& x, const Mesh& mesh, int element)>;

/// Everything needed to advance a discrete solution.
struct Scheme {
  Discretization disc;
  ConstraintSet constraints;
  LimiterConfig limiter;
  IndicatorConfig indicator;
  double cfl = 0.5;
};

/// Aggregated limiter/stabilizer activity over one or more passes.
struct LimiterStats {
  long limited = 0;             // element limiting events with alpha > 0
  double max_alpha = 0.0;
  long gradient_fallbacks = 0;  // constraint evaluations that used gradient descent
  long degenerate = 0;          // g(mean) < eps, alpha forced to 1
  long low_order = 0;           // elements where the subcell candidate was selected
  long records = 0;
  // max over records of alpha_discrete - alpha; stays -inf when nothing was evaluated
  double max_discrete_excess = -std::numeric_limits<double>::infinity();

  void merge(const LimiterStats& o) {
    limited += o.limited;
    max_alpha = std::max(max_alpha, o.max_alpha);
    gradient_fallbacks += o.gradient_fallbacks;
    degenerate += o.degenerate;
    low_order += o.low_order;
    records += o.records;
    max_discrete_excess = std::max(max_discrete_excess, o.max_discrete_excess);
  }
};

struct Workspace {
  std::vector<double> R, fhat, u0, stage, cand, low;
  std::vector<char> pi;

  void resize(const Discretization& d) {
    R.resize(d.dofs());
    fhat.resize(d.face_dofs());
    u0.resize(d.dofs());
    stage.resize(d.dofs());
    cand.resize(d.dofs());
    low.resize(static_cast<size_t>(d.nodes) * d.m * d.num_elements());
    pi.resize(d.num_elements());
  }
};

inline std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", t);
  return buf;
}

/// Outward normal interface fluxes for every element face node. Each interior
/// face is evaluated once (by the element owning face 1 or 3) and mirrored.
inline void face_fluxes(const Discretization& d, std::span<const double> u, std::span<double> fhat) {
  parallel_for(d.num_elements(), [&](int e) {
    for (int f = 0; f < d.nfaces; ++f) {
      const FaceLink& link = d.mesh.links[e][f];
      if (!link.boundary() && f % 2 == 0) continue;
      for (int k = 0; k < d.face_nodes_count; ++k) {
        const int a = d.face_nodes[f][k];
        const StateVec um = d.load(u, e, a);
        StateVec up{};
        if (link.boundary()) {
          const size_t g = d.face_slot(e, f, k);
          for (int c = 0; c < d.m; ++c) up[c] = d.ghost[g + c];
        } else {
          up = d.load(u, link.element, d.face_nodes[link.face][k]);
        }
        StateVec F;
        try {
          F = numerical_flux(um, up, d.normals[f], d.eq, d.xnodes[static_cast<size_t>(e) * d.nodes + a]);
        } catch (const NumericalError& ex) {
          throw NumericalError("element " + std::to_string(e) + " face " + std::to_string(f) + ": " + ex.what());
        }
        const size_t o = d.face_slot(e, f, k);
        for (int c = 0; c < d.m; ++c) fhat[o + c] = F[c];
        if (!link.boundary()) {
          const size_t q = d.face_slot(link.element, link.face, k);
          for (int c = 0; c < d.m; ++c) fhat[q + c] = -F[c];
        }
      }
    }
  });
}

/// FR residual of one element given precomputed face fluxes.
inline void element_residual(const Discretization& d, std::span<const double> u, std::span<const double> fhat, int e,
                             std::span<double> R) {
  constexpr int kMaxNodes = (kMaxOrder + 1) * (kMaxOrder + 1);
  std::array<double, kMaxNodes * kMaxVars> F;
  const int np = d.np, m = d.m;
  const size_t base = d.node_slot(e, 0);
  for (size_t k = 0; k < static_cast<size_t>(d.nodes) * m; ++k) R[base + k] = 0.0;
  const int lines = d.dim() == 1 ? 1 : np;
  for (int axis = 0; axis < d.dim(); ++axis) {
    for (int i = 0; i < d.nodes; ++i) {
      const StateVec f = d.eq.flux(d.load(u, e, i), d.xnodes[static_cast<size_t>(e) * d.nodes + i], axis);
      for (int c = 0; c < m; ++c) F[i * m + c] = f[c];
    }
    const double scale = 2.0 / d.mesh.size[axis];
    const int stride = axis == 0 ? 1 : np;
    for (int l = 0; l < lines; ++l) {
      const int start = axis == 0 ? np * l : l;
      const size_t lo = d.face_slot(e, 2 * axis, l);
      const size_t hi = d.face_slot(e, 2 * axis + 1, l);
      const int n0 = start, n1 = start + stride * d.p;
      for (int i = 0; i < np; ++i) {
        const int node = start + stride * i;
        for (int c = 0; c < m; ++c) {
          double s = 0.0;
          for (int k = 0; k < np; ++k) s += d.D[i * np + k] * F[(start + stride * k) * m + c];
          s += d.gl[i] * (-fhat[lo + c] - F[n0 * m + c]);
          s += d.gr[i] * (fhat[hi + c] - F[n1 * m + c]);
          R[base + static_cast<size_t>(node) * m + c] -= scale * s;
        }
      }
    }
  }
}

/// Semi-discrete time derivative of every DOF. fhat receives the face fluxes.
inline void dg_residual(const Discretization& d, std::span<const double> u, std::span<double> R,
                        std::span<double> fhat) {
  face_fluxes(d, u, fhat);
  parallel_for(d.num_elements(), [&](int e) { element_residual(d, u, fhat, e, R); });
}

/// d(mean)/dt of element e from the face fluxes alone.
inline double surface_mean_rate(const Discretization& d, std::span<const double> fhat, int e, int c) {
  double s = 0.0;
  for (int f = 0; f < d.nfaces; ++f) {
    const int axis = f / 2;
    double acc = 0.0;
    for (int k = 0; k < d.face_nodes_count; ++k) {
      const double w = d.dim() == 1 ? 1.0 : d.what[k];
      acc += w * fhat[d.face_slot(e, f, k) + c];
    }
    s -= acc / d.mesh.size[axis];
  }
  return s;
}

/// Stable time step: CFL * h_min / ((2p + 1) lambda_max), further capped so
/// that the forward-Euler element-mean update stays a convex combination of
/// nodal states (dt * sum_axis lambda_axis / h_axis <= w_end). With the subcell
/// stabilizer the cap is halved to cover the first-order subcell update.
inline double compute_dt(const Discretization& d, std::span<const double> u, double cfl, bool subcell = false,
                         double remaining = std::numeric_limits<double>::infinity()) {
  if (!(cfl > 0.0)) throw ConfigError("CFL must be positive");
  const int ne = d.num_elements();
  std::vector<double> per(ne);
  const double wend = d.min_weight() * (subcell ? 0.5 : 1.0);
  parallel_for(ne, [&](int e) {
    Coord lam{0.0, 0.0};
    for (int i = 0; i < d.nodes; ++i) {
      const StateVec s = d.load(u, e, i);
      const Coord& x = d.xnodes[static_cast<size_t>(e) * d.nodes + i];
      for (int a = 0; a < d.dim(); ++a) lam[a] = std::max(lam[a], d.eq.axis_speed(s, x, a));
    }
    double lmax = 0.0, hmin = std::numeric_limits<double>::infinity(), rate = 0.0;
    for (int a = 0; a < d.dim(); ++a) {
      lmax = std::max(lmax, lam[a]);
      hmin = std::min(hmin, d.mesh.size[a]);
      rate += lam[a] / d.mesh.size[a];
    }
    if (!std::isfinite(lmax)) throw NumericalError("compute_dt: non-finite wavespeed in element " + std::to_string(e));
    double dt = std::numeric_limits<double>::infinity();
    if (lmax > 0.0) dt = std::min(cfl * hmin / ((2.0 * d.p + 1.0) * lmax), wend / rate);
    per[e] = dt;
  });
  double dt = remaining;
  for (double v : per) dt = std::min(dt, v);
  if (!std::isfinite(dt)) throw NumericalError("compute_dt: zero wavespeed everywhere and no time horizon");
  return dt;
}

/// Sum over elements of mean * volume for component c.
inline double conserved_total(const Discretization& d, std::span<const double> u, int c) {
  double s = 0.0;
  for (int e = 0; e < d.num_elements(); ++e) s += d.element_mean(u, e, c) * d.mesh.volume();
  return s;
}

/// Limits every element in place. The contraction is applied to nodal values
/// with the nodal (quadrature) mean, which is exactly preserved.
inline LimiterStats limit_solution(const Discretization& d, const ConstraintSet& set, const LimiterConfig& cfg,
                                   std::span<double> u) {
  LimiterStats total;
  if (cfg.mode == LimiterMode::none || set.size() == 0) return total;
  const int ne = d.num_elements();
  std::vector<LimiterStats> per(ne);
  const size_t len = static_cast<size_t>(d.nodes) * d.m;
  parallel_for(ne, [&](int e) {
    std::span<double> ue = u.subspan(d.node_slot(e, 0), len);
    const ModalSolution modal = nodal_to_modal(ue, d.m, d.basis, e);
    LimiterReport rep;
    limit_element(modal, set, d.basis, cfg, &rep);
    LimiterStats& s = per[e];
    for (const auto& r : rep.records) {
      ++s.records;
      if (r.gradient_fallback) ++s.gradient_fallbacks;
      if (r.degenerate_mean) ++s.degenerate;
      s.max_discrete_excess = std::max(s.max_discrete_excess, r.alpha_discrete - r.alpha);
    }
    if (rep.alpha > 0.0) {
      ++s.limited;
      s.max_alpha = rep.alpha;
      StateVec mean{};
      for (int c = 0; c < d.m; ++c) mean[c] = d.element_mean(u, e, c);
      const double keep = 1.0 - rep.alpha;
      for (int i = 0; i < d.nodes; ++i)
        for (int c = 0; c < d.m; ++c) ue[i * d.m + c] = keep * ue[i * d.m + c] + rep.alpha * mean[c];
    }
  });
  for (const auto& s : per) total.merge(s);
  return total;
}

/// Shu-Osher SSP-RK3. `euler(in, out)` writes a forward-Euler candidate
/// in + dt L(in); `post(v)` is applied after every stage.
template <class Euler, class Post>
void ssp_rk3(std::vector<double>& u, Euler&& euler, Post&& post, std::vector<double>& u0, std::vector<double>& stage,
             std::vector<double>& cand) {
  u0 = u;
  euler(u0, stage);
  post(stage, 0);
  euler(stage, cand);
  for (size_t k = 0; k < u.size(); ++k) stage[k] = 0.75 * u0[k] + 0.25 * cand[k];
  post(stage, 1);
  euler(stage, cand);
  for (size_t k = 0; k < u.size(); ++k) u[k] = u0[k] / 3.0 + 2.0 / 3.0 * cand[k];
  post(u, 2);
}

/// Forward-Euler candidate with optional subcell selection. Returns the
/// number of elements that took the low-order candidate.
inline long euler_candidate(const Scheme& s, const std::vector<double>& in, double dt, std::vector<double>& out,
                            Workspace& ws) {
  const Discretization& d = s.disc;
  dg_residual(d, in, ws.R, ws.fhat);
  for (size_t k = 0; k < in.size(); ++k) out[k] = in[k] + dt * ws.R[k];
  if (!s.indicator.enabled) return 0;
  const size_t len = static_cast<size_t>(d.nodes) * d.m;
  parallel_for(d.num_elements(), [&](int e) {
    std::span<double> low(ws.low.data() + e * len, len);
    low_order_update(d, in, ws.fhat, e, dt, low);
    std::span<double> high(out.data() + d.node_slot(e, 0), len);
    const bool pi = dmp_indicator(low, high, d.m, s.indicator);
    ws.pi[e] = pi;
    if (pi) select(high, low, true, high);
  });
  long n = 0;
  for (char p : ws.pi) n += p;
  return n;
}

/// One SSP-RK3 step with subcell selection then limiting after each stage.
inline LimiterStats ssp_rk3_step(const Scheme& s, SimulationState& st, double dt, Workspace& ws) {
  ws.resize(s.disc);
  LimiterStats stats;
  int stage_id = 0;
  try {
    auto euler = [&](const std::vector<double>& in, std::vector<double>& out) {
      stats.low_order += euler_candidate(s, in, dt, out, ws);
    };
    auto post = [&](std::vector<double>& v, int k) {
      stage_id = k;
      stats.merge(limit_solution(s.disc, s.constraints, s.limiter, v));
    };
    ssp_rk3(st.u, euler, post, ws.u0, ws.stage, ws.cand);
  } catch (const NumericalError& ex) {
    throw NumericalError("t=" + format_time(st.t) + " stage " + std::to_string(stage_id + 1) + ": " + ex.what());
  }
  st.t += dt;
  ++st.step;
  return stats;
}

/// Interpolates the initial condition at the solution nodes, freezes the
/// boundary ghost states, and applies one limiting pass.
inline SimulationState initialize(Scheme& s, const InitialCondition& ic, LimiterStats* stats = nullptr) {
  Discretization& d = s.disc;
  SimulationState st;
  st.u.assign(d.dofs(), 0.0);
  const int ne = d.num_elements();
  for (int e = 0; e < ne; ++e) {
    for (int i = 0; i < d.nodes; ++i) {
      const StateVec v = ic(d.xnodes[static_cast<size_t>(e) * d.nodes + i], d.mesh, e);
      for (int c = 0; c < d.m; ++c) st.u[d.node_slot(e, i) + c] = v[c];
    }
    for (int f = 0; f < d.nfaces; ++f) {
      if (!d.mesh.links[e][f].boundary()) continue;
      for (int k = 0; k < d.face_nodes_count; ++k) {
        const int a = d.face_nodes[f][k];
        const StateVec v = ic(d.xnodes[static_cast<size_t>(e) * d.nodes + a], d.mesh, e);
        for (int c = 0; c < d.m; ++c) d.ghost[d.face_slot(e, f, k) + c] = v[c];
      }
    }
  }
  try {
    const LimiterStats ls = limit_solution(d, s.constraints, s.limiter, st.u);
    if (stats) *stats = ls;
  } catch (const NumericalError& ex) {
    throw NumericalError(std::string("initialization: ") + ex.what());
  }
  return st;
}

}  // namespace cbp
