#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "cbp/basis.hpp"

using namespace cbp;

namespace {

// Gauss-Legendre rule by Newton on the three-term recurrence, kept separate
// from the library's Lobatto code.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Nested Horner in x then y over a dense coefficient table c[a][b].
double horner2(const std::vector<std::vector<double>>& c, double x, double y) {
  double s = 0.0;
  for (int a = static_cast<int>(c.size()) - 1; a >= 0; --a) {
    double t = 0.0;
    for (int b = static_cast<int>(c[a].size()) - 1; b >= 0; --b) t = t * y + c[a][b];
    s = s * x + t;
  }
  return s;
}

ModalSolution random_modal(const Basis& b, std::mt19937_64& rng, int m = 1) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ModalSolution u(m, b.size());
  for (auto& c : u.coeffs) c = U(rng);
  return u;
}

}  // namespace

TEST(Basis, GaussLobattoSmallRules) {
  auto [x1, w1] = gauss_lobatto(1);
  EXPECT_EQ(x1, (std::vector<double>{-1.0, 1.0}));
  EXPECT_NEAR(w1[0], 1.0, 1e-15);
  EXPECT_NEAR(w1[1], 1.0, 1e-15);
  auto [x2, w2] = gauss_lobatto(2);
  EXPECT_NEAR(x2[1], 0.0, 1e-15);
  EXPECT_NEAR(w2[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(w2[1], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(w2[2], 1.0 / 3.0, 1e-15);
  auto [x3, w3] = gauss_lobatto(3);
  EXPECT_NEAR(x3[2], 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(w3[0], 1.0 / 6.0, 1e-15);
  auto [x4, w4] = gauss_lobatto(4);
  EXPECT_NEAR(x4[3], std::sqrt(3.0 / 7.0), 1e-15);
  EXPECT_NEAR(w4[2], 32.0 / 45.0, 1e-15);
}

TEST(Basis, GaussLobattoExactToDegree2pMinus1) {
  for (int p = 1; p <= kMaxOrder; ++p) {
    auto [x, w] = gauss_lobatto(p);
    for (int q = 0; q <= 2 * p - 1; ++q) {
      double s = 0.0;
      for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], q);
      EXPECT_NEAR(s, q % 2 == 0 ? 2.0 / (q + 1.0) : 0.0, 1e-13) << "p=" << p << " q=" << q;
    }
  }
}

TEST(Basis, NodeCountsAndWeightSums) {
  for (int p = 1; p <= 6; ++p) {
    const auto s = build_basis(ElementKind::segment, p);
    const auto q = build_basis(ElementKind::quad, p);
    const auto t = build_basis(ElementKind::triangle, p);
    EXPECT_EQ(s.nodal.size(), p + 1);
    EXPECT_EQ(q.nodal.size(), (p + 1) * (p + 1));
    EXPECT_EQ(t.nodal.size(), (p + 1) * (p + 2) / 2);
    double ws = 0, wq = 0, wt = 0;
    for (double w : s.nodal.weights) ws += w;
    for (double w : q.nodal.weights) wq += w;
    for (double w : t.nodal.weights) wt += w;
    EXPECT_NEAR(ws, 2.0, 1e-12);
    EXPECT_NEAR(wq, 4.0, 1e-12);
    EXPECT_NEAR(wt, 2.0, 1e-12);
    EXPECT_LT(t.nodal.condition, kMaxVandermondeCondition);
  }
}

TEST(Basis, QuadP2HasNineTensorNodes) {
  const auto b = build_basis(ElementKind::quad, 2);
  ASSERT_EQ(b.nodal.size(), 9);
  EXPECT_EQ(b.nodal.nodes[1], (Coord{0.0, -1.0}));
  EXPECT_EQ(b.nodal.nodes[3], (Coord{-1.0, 0.0}));
}

TEST(Basis, RejectsUnsupportedOrder) {
  EXPECT_THROW(build_basis(ElementKind::segment, 0), ConfigError);
  EXPECT_THROW(build_basis(ElementKind::quad, kMaxOrder + 1), ConfigError);
}

TEST(Basis, MultiIndicesUniqueSortedComplete) {
  for (auto k : {ElementKind::segment, ElementKind::quad, ElementKind::triangle})
    for (int p = 1; p <= 5; ++p) {
      const auto mb = MonomialBasis::make(k, p);
      std::set<std::array<int, 2>> seen(mb.exponents.begin(), mb.exponents.end());
      EXPECT_EQ(seen.size(), mb.exponents.size());
      for (size_t i = 1; i < mb.exponents.size(); ++i) {
        const auto& a = mb.exponents[i - 1];
        const auto& b = mb.exponents[i];
        EXPECT_TRUE(std::tuple(a[0] + a[1], a[0], a[1]) < std::tuple(b[0] + b[1], b[0], b[1]));
      }
      const int expect = k == ElementKind::segment ? p + 1
                         : k == ElementKind::quad  ? (p + 1) * (p + 1)
                                                   : (p + 1) * (p + 2) / 2;
      EXPECT_EQ(mb.size(), expect);
      for (const auto& e : mb.exponents) {
        if (k == ElementKind::triangle) {
          EXPECT_LE(e[0] + e[1], p);
        }
        EXPECT_LE(e[0], p);
        EXPECT_LE(e[1], p);
        if (k == ElementKind::segment) {
          EXPECT_EQ(e[1], 0);
        }
      }
      EXPECT_EQ(mb.exponents[0], (std::array<int, 2>{0, 0}));
    }
}

TEST(Basis, ConstantFieldHasOnlyConstantMode) {
  for (auto k : {ElementKind::segment, ElementKind::quad, ElementKind::triangle})
    for (int p = 1; p <= 5; ++p) {
      const auto b = build_basis(k, p);
      std::vector<double> nodal(b.size(), 3.0);
      const auto u = nodal_to_modal(nodal, 1, b);
      EXPECT_NEAR(u(0, 0), 3.0, 1e-11);
      for (int i = 1; i < b.size(); ++i) EXPECT_NEAR(u(0, i), 0.0, 1e-10);
    }
}

TEST(Basis, LinearSegment) {
  const auto b = build_basis(ElementKind::segment, 1);
  const auto u = nodal_to_modal(std::vector<double>{-1.0, 1.0}, 1, b);
  EXPECT_NEAR(u(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(u(0, 1), 1.0, 1e-15);
}

TEST(Basis, RoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (auto k : {ElementKind::segment, ElementKind::quad, ElementKind::triangle})
    for (int p = 1; p <= 6; ++p) {
      const auto b = build_basis(k, p);
      const int m = 3;
      std::vector<double> nodal(static_cast<size_t>(b.size()) * m);
      for (auto& v : nodal) v = U(rng);
      const auto u = nodal_to_modal(nodal, m, b);
      const auto back = modal_to_nodal(u, b);
      for (size_t i = 0; i < nodal.size(); ++i) EXPECT_NEAR(back[i], nodal[i], 1e-10);
      for (int i = 0; i < b.size(); ++i) {
        const StateVec v = modal_evaluate(u, b, b.nodal.nodes[i]);
        for (int c = 0; c < m; ++c) EXPECT_NEAR(v[c], nodal[i * m + c], 1e-10);
      }
    }
}

TEST(Basis, NodalToModalChecksSize) {
  const auto b = build_basis(ElementKind::segment, 2);
  EXPECT_THROW(nodal_to_modal(std::vector<double>(4), 1, b), UsageError);
}

TEST(Basis, EvaluateSimpleCases) {
  const auto b = build_basis(ElementKind::segment, 2);
  ModalSolution u(1, 3);
  u(0, 2) = 1.0;  // x^2
  EXPECT_DOUBLE_EQ(modal_evaluate(u, b, {0.5, 0.0})[0], 0.25);
  const auto t = build_basis(ElementKind::triangle, 3);
  ModalSolution c(1, t.size());
  c(0, 0) = 1.7;
  EXPECT_DOUBLE_EQ(modal_evaluate(c, t, t.element.centroid())[0], 1.7);
}

TEST(Basis, EvaluateMatchesHorner) {
  std::mt19937_64 rng(3);
  for (auto k : {ElementKind::segment, ElementKind::quad}) {
    const auto b = build_basis(k, 3);
    const auto u = random_modal(b, rng);
    std::vector<std::vector<double>> table(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < b.size(); ++i) table[b.modal.exponents[i][0]][b.modal.exponents[i][1]] = u(0, i);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      const Coord x{U(rng), k == ElementKind::segment ? 0.0 : U(rng)};
      EXPECT_NEAR(modal_evaluate(u, b, x)[0], horner2(table, x[0], x[1]), 1e-12);
    }
  }
}

TEST(Basis, MeanSimpleCases) {
  const auto s = build_basis(ElementKind::segment, 1);
  EXPECT_NEAR(element_mean(nodal_to_modal(std::vector<double>{-1.0, 1.0}, 1, s), s)[0], 0.0, 1e-15);
  const auto q = build_basis(ElementKind::quad, 2);
  ModalSolution u(1, q.size());
  for (int i = 0; i < q.size(); ++i)
    if (q.modal.exponents[i] == std::array<int, 2>{2, 0}) u(0, i) = 1.0;
  EXPECT_NEAR(element_mean(u, q)[0], 1.0 / 3.0, 1e-15);
}

TEST(Basis, MeanMatchesGaussQuadrature) {
  std::mt19937_64 rng(5);
  std::vector<double> gx, gw;
  gauss_legendre(50, gx, gw);
  const auto q = build_basis(ElementKind::quad, 4);
  const auto t = build_basis(ElementKind::triangle, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_modal(q, rng);
    double s = 0.0;
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) s += gw[i] * gw[j] * modal_evaluate(u, q, {gx[i], gx[j]})[0];
    EXPECT_NEAR(element_mean(u, q)[0], s / 4.0, 1e-12);

    // Collapsed map from the square: x = (1+a)(1-b)/2 - 1, y = b, J = (1-b)/2.
    const auto v = random_modal(t, rng);
    double st = 0.0;
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double a = gx[i], b = gx[j];
        const Coord x{(1.0 + a) * (1.0 - b) / 2.0 - 1.0, b};
        st += gw[i] * gw[j] * 0.5 * (1.0 - b) * modal_evaluate(v, t, x)[0];
      }
    EXPECT_NEAR(element_mean(v, t)[0], st / 2.0, 1e-12);
  }
}

TEST(Basis, SegmentMeanEqualsNodalQuadrature) {
  std::mt19937_64 rng(9);
  for (int p = 1; p <= 6; ++p) {
    const auto b = build_basis(ElementKind::segment, p);
    const auto u = random_modal(b, rng);
    const auto nodal = modal_to_nodal(u, b);
    double s = 0.0;
    for (int i = 0; i < b.size(); ++i) s += b.nodal.weights[i] * nodal[i];
    EXPECT_NEAR(element_mean(u, b)[0], s / 2.0, 1e-13);
  }
}
