#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cbp/errors.hpp"
#include "cbp/reference.hpp"

namespace cbp {

inline constexpr int kMaxVars = 4;
inline constexpr int kMaxOrder = 8;

// Pointwise solution state; only the first m entries are meaningful.
using StateVec = std::array<double, kMaxVars>;

// Legendre polynomial P_n and its derivative at x.
inline std::pair<double, double> legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // P_n' from the standard recurrence; the endpoint branch avoids 0/0.
  double dp;
  if (std::abs(std::abs(x) - 1.0) < 1e-15)
    dp = 0.5 * n * (n + 1.0) * std::pow(x > 0 ? 1.0 : -1.0, n + 1);
  else
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

/// Gauss-Lobatto nodes (ascending) and weights on [-1,1], p+1 points.
inline std::pair<std::vector<double>, std::vector<double>> gauss_lobatto(int p) {
  const int n = p + 1;
  std::vector<double> x(n), w(n);
  x.front() = -1.0;
  x.back() = 1.0;
  // Interior nodes: roots of P_p'. Newton from Chebyshev-Gauss-Lobatto guesses.
  for (int i = 1; i < n - 1; ++i) {
    double xi = -std::cos(M_PI * i / p);
    for (int it = 0; it < 100; ++it) {
      // q = P_p', q' = P_p'' via the Legendre ODE.
      const auto [pn, dpn] = legendre(p, xi);
      const double d2pn = (2.0 * xi * dpn - p * (p + 1.0) * pn) / (1.0 - xi * xi);
      const double dx = dpn / d2pn;
      xi -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x[i] = xi;
  }
  for (int i = 0; i < n; ++i) {
    const double pn = legendre(p, x[i]).first;
    w[i] = 2.0 / (p * (p + 1.0) * pn * pn);
  }
  // Enforce exact symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -a;
    x[n - 1 - i] = a;
    const double ww = 0.5 * (w[i] + w[n - 1 - i]);
    w[i] = w[n - 1 - i] = ww;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

/// Monomial (power) basis x^a y^b.
struct MonomialBasis {
  ElementKind kind = ElementKind::segment;
  int order = 1;
  std::vector<std::array<int, 2>> exponents;  // sorted by (total degree, lexicographic)

  int size() const { return static_cast<int>(exponents.size()); }

  static MonomialBasis make(ElementKind kind, int p) {
    MonomialBasis b;
    b.kind = kind;
    b.order = p;
    if (kind == ElementKind::segment) {
      for (int a = 0; a <= p; ++a) b.exponents.push_back({a, 0});
    } else {
      for (int a = 0; a <= p; ++a)
        for (int c = 0; c <= p; ++c)
          if (kind == ElementKind::quad || a + c <= p) b.exponents.push_back({a, c});
    }
    std::sort(b.exponents.begin(), b.exponents.end(), [](const auto& l, const auto& r) {
      return std::tuple(l[0] + l[1], l[0], l[1]) < std::tuple(r[0] + r[1], r[0], r[1]);
    });
    return b;
  }

  // psi must have size() entries.
  void evaluate(const Coord& x, std::span<double> psi) const {
    std::array<double, kMaxOrder + 1> px{}, py{};
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      px[k] = px[k - 1] * x[0];
      py[k] = py[k - 1] * x[1];
    }
    for (int i = 0; i < size(); ++i) psi[i] = px[exponents[i][0]] * py[exponents[i][1]];
  }
};

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

inline double segment_moment(int q) { return q % 2 == 0 ? 2.0 / (q + 1.0) : 0.0; }

// Integral of x^a y^b over the reference triangle, via x = 2s-1, y = 2t-1 and
// the simplex moment formula int s^i t^j = i! j! / (i+j+2)!.
inline double triangle_moment(int a, int b) {
  double sum = 0.0;
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j <= b; ++j) {
      const double c = binomial(a, i) * binomial(b, j) * std::pow(2.0, i + j) *
                       (((a - i) + (b - j)) % 2 == 0 ? 1.0 : -1.0);
      sum += c * factorial(i) * factorial(j) / factorial(i + j + 2);
    }
  return 4.0 * sum;
}

}  // namespace detail

/// Exact integral of each monomial over the reference element.
inline std::vector<double> monomial_integrals(const MonomialBasis& mb) {
  std::vector<double> out(mb.size());
  for (int i = 0; i < mb.size(); ++i) {
    const auto [a, b] = mb.exponents[i];
    switch (mb.kind) {
      case ElementKind::segment: out[i] = detail::segment_moment(a); break;
      case ElementKind::quad: out[i] = detail::segment_moment(a) * detail::segment_moment(b); break;
      case ElementKind::triangle: out[i] = detail::triangle_moment(a, b); break;
    }
  }
  return out;
}

/// Solution nodes with their collocated quadrature rule and Vandermonde matrix.
struct NodalBasis {
  ElementKind kind = ElementKind::segment;
  int order = 1;
  std::vector<Coord> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd vandermonde;  // V(i,j) = psi_j(node_i)
  Eigen::MatrixXd inverse;      // V^{-1}
  double condition = 1.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Nodal and monomial bases sharing one reference element, plus the data the
/// limiter and solver reuse per element.
struct Basis {
  ReferenceElement element;
  NodalBasis nodal;
  MonomialBasis modal;
  std::vector<double> mean_weights;  // monomial integrals / element measure
  std::vector<double> line_nodes;    // 1D GL nodes (tensor kinds)
  std::vector<double> line_weights;  // 1D GL weights (tensor kinds), sum 2

  int order() const { return modal.order; }
  int dim() const { return element.dim; }
  int size() const { return modal.size(); }
};

inline constexpr double kMaxVandermondeCondition = 1e12;

inline Basis build_basis(ElementKind kind, int p) {
  if (p < 1 || p > kMaxOrder)
    throw ConfigError("unsupported polynomial order " + std::to_string(p) + " (supported: 1.." +
                      std::to_string(kMaxOrder) + ")");
  Basis b;
  b.element = ReferenceElement::make(kind);
  b.modal = MonomialBasis::make(kind, p);
  auto& nb = b.nodal;
  nb.kind = kind;
  nb.order = p;

  if (kind == ElementKind::triangle) {
    // Equispaced barycentric lattice, row by row in y.
    for (int j = 0; j <= p; ++j)
      for (int i = 0; i + j <= p; ++i) nb.nodes.push_back({-1.0 + 2.0 * i / p, -1.0 + 2.0 * j / p});
  } else {
    auto [x, w] = gauss_lobatto(p);
    b.line_nodes = x;
    b.line_weights = w;
    if (kind == ElementKind::segment) {
      for (int i = 0; i <= p; ++i) {
        nb.nodes.push_back({x[i], 0.0});
        nb.weights.push_back(w[i]);
      }
    } else {
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
          nb.nodes.push_back({x[i], x[j]});
          nb.weights.push_back(w[i] * w[j]);
        }
    }
  }

  const int n = nb.size();
  nb.vandermonde.resize(n, n);
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) {
    b.modal.evaluate(nb.nodes[i], psi);
    for (int j = 0; j < n; ++j) nb.vandermonde(i, j) = psi[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(nb.vandermonde);
  const auto& sv = svd.singularValues();
  nb.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                         : std::numeric_limits<double>::infinity();
  if (!(nb.condition <= kMaxVandermondeCondition))
    throw NumericalError("Vandermonde matrix for " + to_string(kind) + " p=" + std::to_string(p) +
                         " is ill-conditioned (condition " + std::to_string(nb.condition) + ")");
  nb.inverse = nb.vandermonde.partialPivLu().inverse();

  const auto integrals = monomial_integrals(b.modal);
  const double measure = b.element.measure();
  b.mean_weights.resize(n);
  for (int j = 0; j < n; ++j) b.mean_weights[j] = integrals[j] / measure;

  if (kind == ElementKind::triangle) {
    // Interpolatory weights: V^T w = integrals.
    Eigen::VectorXd rhs(n);
    for (int j = 0; j < n; ++j) rhs(j) = integrals[j];
    Eigen::VectorXd w = nb.vandermonde.transpose().partialPivLu().solve(rhs);
    nb.weights.assign(w.data(), w.data() + n);
  }
  return b;
}

/// Monomial coefficients of one element: coeff(c, i) multiplies psi_i for component c.
struct ModalSolution {
  int element = -1;
  int ncomp = 1;
  int nmodes = 0;
  std::vector<double> coeffs;  // component-major

  ModalSolution() = default;
  ModalSolution(int ncomp_, int nmodes_, int element_ = -1)
      : element(element_), ncomp(ncomp_), nmodes(nmodes_), coeffs(static_cast<size_t>(ncomp_) * nmodes_, 0.0) {}

  double& operator()(int c, int i) { return coeffs[static_cast<size_t>(c) * nmodes + i]; }
  double operator()(int c, int i) const { return coeffs[static_cast<size_t>(c) * nmodes + i]; }
};

/// Nodal values (node-major: value[node * m + comp]) to monomial coefficients.
inline ModalSolution nodal_to_modal(std::span<const double> nodal, int m, const Basis& basis,
                                    int element = -1) {
  const int n = basis.size();
  if (static_cast<int>(nodal.size()) != n * m)
    throw UsageError("nodal_to_modal: expected " + std::to_string(n * m) + " values, got " +
                     std::to_string(nodal.size()));
  ModalSolution out(m, n, element);
  const auto& inv = basis.nodal.inverse;
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += inv(i, j) * nodal[j * m + c];
      out(c, i) = s;
    }
  return out;
}

/// Nodal values (node-major) of a modal solution at the basis nodes.
inline std::vector<double> modal_to_nodal(const ModalSolution& u, const Basis& basis) {
  const int n = basis.size();
  const int m = u.ncomp;
  std::vector<double> out(static_cast<size_t>(n) * m, 0.0);
  const auto& v = basis.nodal.vandermonde;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += v(i, j) * u(c, j);
      out[i * m + c] = s;
    }
  return out;
}

inline StateVec modal_evaluate(const ModalSolution& u, const MonomialBasis& mb, const Coord& x) {
  std::array<double, kMaxOrder + 1> px{}, py{};
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= mb.order; ++k) {
    px[k] = px[k - 1] * x[0];
    py[k] = py[k - 1] * x[1];
  }
  StateVec out{};
  const int n = u.nmodes;
  for (int i = 0; i < n; ++i) {
    const double psi = px[mb.exponents[i][0]] * py[mb.exponents[i][1]];
    for (int c = 0; c < u.ncomp; ++c) out[c] += u.coeffs[static_cast<size_t>(c) * n + i] * psi;
  }
  return out;
}

inline StateVec modal_evaluate(const ModalSolution& u, const Basis& basis, const Coord& x) {
  return modal_evaluate(u, basis.modal, x);
}

/// Exact element average from precomputed monomial integrals.
inline StateVec element_mean(const ModalSolution& u, const Basis& basis) {
  StateVec out{};
  for (int c = 0; c < u.ncomp; ++c) {
    double s = 0.0;
    for (int i = 0; i < u.nmodes; ++i) s += basis.mean_weights[i] * u(c, i);
    out[c] = s;
  }
  return out;
}

}  // namespace cbp
