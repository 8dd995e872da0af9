#pragma once

#include <algorithm>
#include <limits>
#include <span>

#include "cbp/constraints.hpp"
#include "cbp/discretization.hpp"
#include "cbp/equations.hpp"

namespace cbp {

struct IndicatorConfig {
  bool enabled = false;
  double eps_d = 1e-2;
  Measure measure = Measure::of_component(0);  // density for Euler (component 0)
};

namespace detail {

// First-order subcell rate along one GL line of element e. `line` lists the
// element nodes in order, fl/fr are the element-face fluxes in the +axis
// direction at the two ends, and width is the element width along the axis.
inline void subcell_line(const Discretization& d, std::span<const double> u, int e, const int* line, const StateVec& fl,
                         const StateVec& fr, int axis, double width, std::span<double> rate) {
  const int np = d.np;
  Coord n{0.0, 0.0};
  n[axis] = 1.0;
  StateVec left = fl;
  for (int i = 0; i < np; ++i) {
    StateVec right;
    if (i + 1 < np) {
      const int a = line[i], b = line[i + 1];
      const Coord& xa = d.xnodes[static_cast<size_t>(e) * d.nodes + a];
      const Coord& xb = d.xnodes[static_cast<size_t>(e) * d.nodes + b];
      const Coord xm = 0.5 * (xa + xb);
      right = rusanov_flux(d.load(u, e, a), d.load(u, e, b), n, d.eq, xm);
    } else {
      right = fr;
    }
    const double inv = 1.0 / (d.what[i] * width);
    const size_t o = static_cast<size_t>(line[i]) * d.m;
    for (int c = 0; c < d.m; ++c) rate[o + c] -= (right[c] - left[c]) * inv;
    left = right;
  }
}

}  // namespace detail

/// Time derivative of the low-order subcell finite-volume scheme on element e.
///
/// Subcells are the GL-weight partition of the element. Interior subcell
/// interfaces use the Rusanov flux and the element faces reuse the DG interface
/// fluxes `fhat` (outward normal fluxes per face node), so the subcell-weighted
/// mean rate equals the DG mean rate. `rate` has nodes * m entries.
inline void low_order_rate(const Discretization& d, std::span<const double> u, std::span<const double> fhat, int e,
                           std::span<double> rate) {
  std::fill(rate.begin(), rate.end(), 0.0);
  const int np = d.np;
  std::array<int, kMaxOrder + 1> line{};
  StateVec fl{}, fr{};
  auto face_flux = [&](int f, int k, double sign) {
    StateVec s{};
    const size_t o = d.face_slot(e, f, k);
    for (int c = 0; c < d.m; ++c) s[c] = sign * fhat[o + c];
    return s;
  };
  if (d.dim() == 1) {
    for (int i = 0; i < np; ++i) line[i] = i;
    detail::subcell_line(d, u, e, line.data(), face_flux(0, 0, -1.0), face_flux(1, 0, 1.0), 0, d.mesh.size[0], rate);
    return;
  }
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) line[i] = i + np * j;
    fl = face_flux(0, j, -1.0);
    fr = face_flux(1, j, 1.0);
    detail::subcell_line(d, u, e, line.data(), fl, fr, 0, d.mesh.size[0], rate);
  }
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < np; ++j) line[j] = i + np * j;
    fl = face_flux(2, i, -1.0);
    fr = face_flux(3, i, 1.0);
    detail::subcell_line(d, u, e, line.data(), fl, fr, 1, d.mesh.size[1], rate);
  }
}

/// u_L = u + dt * (low-order rate) on element e; out has nodes * m entries.
inline void low_order_update(const Discretization& d, std::span<const double> u, std::span<const double> fhat, int e,
                             double dt, std::span<double> out) {
  low_order_rate(d, u, fhat, e, out);
  const size_t o = d.node_slot(e, 0);
  for (size_t k = 0; k < out.size(); ++k) out[k] = u[o + k] + dt * out[k];
}

/// Relaxed discrete maximum principle test. Returns true (use the low-order
/// candidate) when some high-order nodal value of mu leaves
/// [(1 - eps) min mu(u_L), (1 + eps) max mu(u_L)].
inline bool dmp_indicator(std::span<const double> uL, std::span<const double> uH, int m, const IndicatorConfig& cfg) {
  const size_t n = uL.size() / m;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (size_t i = 0; i < n; ++i) {
    const double v = cfg.measure(uL.subspan(i * m, m));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mu_min = (1.0 - cfg.eps_d) * lo;
  const double mu_max = (1.0 + cfg.eps_d) * hi;
  for (size_t i = 0; i < n; ++i) {
    const double v = cfg.measure(uH.subspan(i * m, m));
    if (!(v >= mu_min && v <= mu_max)) return true;
  }
  return false;
}

/// Copies the accepted candidate into out.
inline void select(std::span<const double> uH, std::span<const double> uL, bool pi, std::span<double> out) {
  const auto& src = pi ? uL : uH;
  std::copy(src.begin(), src.end(), out.begin());
}

}  // namespace cbp
