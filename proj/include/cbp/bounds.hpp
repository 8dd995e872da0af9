#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "cbp/basis.hpp"
#include "cbp/constraints.hpp"
#include "cbp/errors.hpp"
#include "cbp/reference.hpp"

namespace cbp {

/// Axis-aligned box [lo, hi] in reference coordinates (second entries ignored on segments).
struct Box {
  Coord lo{};
  Coord hi{};
};

namespace detail {

// Range of z^q for z in [a, b].
inline std::pair<double, double> power_range(double a, double b, int q) {
  if (q == 0) return {1.0, 1.0};
  const double pa = std::pow(a, q), pb = std::pow(b, q);
  double lo = std::min(pa, pb), hi = std::max(pa, pb);
  if (q % 2 == 0 && a < 0.0 && b > 0.0) lo = 0.0;
  return {lo, hi};
}

}  // namespace detail

/// Certified per-component enclosure of a monomial-basis polynomial on a
/// sub-box of its reference element, summed from per-term extremes.
inline std::vector<std::pair<double, double>> monomial_bounds(const ModalSolution& u, const MonomialBasis& mb,
                                                              const Box& box) {
  const ReferenceElement ref = ReferenceElement::make(mb.kind);
  if (mb.kind == ElementKind::triangle) throw UsageError("monomial_bounds: tensor-product kinds only");
  const int dim = ref.dim;
  for (int k = 0; k < dim; ++k)
    if (!(box.lo[k] <= box.hi[k]) || box.lo[k] < -1.0 || box.hi[k] > 1.0)
      throw UsageError("monomial_bounds: box outside the reference element");
  std::vector<std::pair<double, double>> out(u.ncomp, {0.0, 0.0});
  for (int i = 0; i < u.nmodes; ++i) {
    const auto [xl, xh] = detail::power_range(box.lo[0], box.hi[0], mb.exponents[i][0]);
    const auto [yl, yh] = dim > 1 ? detail::power_range(box.lo[1], box.hi[1], mb.exponents[i][1])
                                  : std::pair<double, double>{1.0, 1.0};
    const double c4[4] = {xl * yl, xl * yh, xh * yl, xh * yh};
    const double tlo = *std::min_element(c4, c4 + 4);
    const double thi = *std::max_element(c4, c4 + 4);
    for (int c = 0; c < u.ncomp; ++c) {
      const double a = u(c, i);
      out[c].first += a >= 0.0 ? a * tlo : a * thi;
      out[c].second += a >= 0.0 ? a * thi : a * tlo;
    }
  }
  return out;
}

/// Lower bound of a concave functional over a component box: minimum over the 2^m corners.
inline double concave_g_bound(const std::vector<std::pair<double, double>>& bounds, const ConstraintFunctional& g) {
  const int m = static_cast<int>(bounds.size());
  if (m > kMaxVars) throw UsageError("concave_g_bound: too many components");
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    StateVec corner{};
    for (int c = 0; c < m; ++c) corner[c] = (mask >> c) & 1 ? bounds[c].second : bounds[c].first;
    best = std::min(best, g(std::span<const double>(corner.data(), m)));
  }
  return best;
}

}  // namespace cbp
