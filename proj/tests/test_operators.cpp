#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "cbp/operators.hpp"
#include "cbp/rational.hpp"

using namespace cbp;

namespace {

Eigen::MatrixXd dense_weight(std::size_t n, double c) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    W(i, i) = c / (c + 2);
    W(i, (i + 1) % n) += 1 / (c + 2);
    W(i, (i + n - 1) % n) += 1 / (c + 2);
  }
  return W;
}

Eigen::MatrixXd dense_penta(std::size_t n, const CoefficientSet& k) {
  auto row = weighting_row(k);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (int off = -2; off <= 2; ++off) W(i, (i + n + off) % n) += row[off + 2];
  return W;
}

Field random_field(std::size_t n, unsigned seed, double lo = -1, double hi = 1) {
  std::mt19937 g(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Field u(n);
  for (auto& v : u) v = d(g);
  return u;
}

double sin_error(const CoefficientSet& k, std::size_t n) {
  const double dx = 2 * std::numbers::pi / n;
  Field f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::sin((i + 1) * dx);
  Field d = compact_derivative(k, f, dx);
  double e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double exact = k.derivative_order == 1 ? std::cos((i + 1) * dx) : -std::sin((i + 1) * dx);
    e = std::max(e, std::abs(d[i] - exact));
  }
  return e;
}

}  // namespace

TEST(Coefficients, FourthOrderFirstDerivativeIsTheSimpsonWeighting) {
  auto k = first_derivative_coefficients(4);
  EXPECT_DOUBLE_EQ(k.alpha / k.normalization(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(k.normalized_a(), 1.0);
  EXPECT_EQ(k.normalized_b(), 0.0);
  EXPECT_DOUBLE_EQ(k.cfl_factor, 1.0 / 3.0);
  auto w = weight_chain(k, 8);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0].c(), 4.0);
}

TEST(Coefficients, SixthOrderFirstDerivativeAtHalf) {
  auto k = first_derivative_coefficients(6, 0.5);
  EXPECT_DOUBLE_EQ(k.beta, 1.0 / 24);
  EXPECT_DOUBLE_EQ(k.a, 13.0 / 9);
  EXPECT_DOUBLE_EQ(k.b, 23.0 / 36);
}

TEST(Coefficients, EighthOrderFirstDerivative) {
  auto k = first_derivative_coefficients(8);
  EXPECT_DOUBLE_EQ(k.alpha, 4.0 / 9);
  EXPECT_DOUBLE_EQ(k.beta, 1.0 / 36);
  EXPECT_DOUBLE_EQ(k.a, 40.0 / 27);
  EXPECT_DOUBLE_EQ(k.b, 25.0 / 54);
  EXPECT_DOUBLE_EQ(k.cfl_factor, 6.0 / 25);
}

TEST(Coefficients, SecondDerivativeFamilies) {
  auto k4 = second_derivative_coefficients(4);
  EXPECT_DOUBLE_EQ(k4.alpha, 0.1);
  EXPECT_EQ(k4.beta, 0.0);
  EXPECT_DOUBLE_EQ(k4.a, 1.2);
  EXPECT_EQ(k4.b, 0.0);
  EXPECT_DOUBLE_EQ(k4.cfl_factor, 5.0 / 12);

  auto k6 = second_derivative_coefficients(6, 1.0 / 3);
  EXPECT_DOUBLE_EQ(k6.beta, 5.0 / 372);
  EXPECT_DOUBLE_EQ(k6.a, 22.0 / 31);
  EXPECT_DOUBLE_EQ(k6.b, 61.0 / 62);

  auto k8 = second_derivative_coefficients(8);
  EXPECT_DOUBLE_EQ(k8.alpha, 344.0 / 1179);
  EXPECT_DOUBLE_EQ(k8.beta, 23.0 / 2358);
  EXPECT_DOUBLE_EQ(k8.a, 320.0 / 393);
  EXPECT_DOUBLE_EQ(k8.b, 310.0 / 393);
}

TEST(Coefficients, EighthOrderConvectionDiffusionConstantsAreHalved) {
  // half of 6/25 and of the second-derivative family constant at 344/1179
  EXPECT_NEAR(first_derivative_coefficients(8).cfl_factor / 2, 3.0 / 25, 1e-15);
  EXPECT_NEAR(second_derivative_coefficients(8).cfl_factor / 2, 131.0 / 530, 1e-15);
}

TEST(Coefficients, TaylorConsistencyOfSixthOrderFamily) {
  // (alpha, beta, a, b) satisfy the order conditions of the normalized scheme up to h^6
  for (double al : {0.4, 0.5, 5.0 / 9}) {
    auto k = first_derivative_coefficients(6, al);
    // a + b = 1 + 2 alpha + 2 beta ; a + 4b = 6(alpha + 4 beta) ; a + 16b = 10(alpha + 16 beta)
    EXPECT_NEAR(k.a + k.b, 1 + 2 * k.alpha + 2 * k.beta, 1e-14);
    EXPECT_NEAR(k.a + 4 * k.b, 6 * (k.alpha + 4 * k.beta), 1e-14);
  }
  for (double al : {0.2, 1.0 / 3, 0.5}) {
    auto k = second_derivative_coefficients(6, al);
    EXPECT_NEAR(k.a + k.b, 1 + 2 * k.alpha + 2 * k.beta, 1e-14);
    EXPECT_NEAR(k.a + 4 * k.b, 12 * (k.alpha + 4 * k.beta), 1e-13);
  }
}

TEST(Coefficients, InadmissibleAlphaIsADomainError) {
  EXPECT_THROW(first_derivative_coefficients(6, 1.0 / 3), std::domain_error);
  EXPECT_THROW(first_derivative_coefficients(6, 0.56), std::domain_error);
  EXPECT_THROW(second_derivative_coefficients(6, 2.0 / 11), std::domain_error);
  EXPECT_THROW(second_derivative_coefficients(6, 60.0 / 113 + 1e-9), std::domain_error);
  EXPECT_THROW(first_derivative_coefficients(5), std::domain_error);
  try {
    first_derivative_coefficients(6, 0.2);
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("(1/3, 5/9]"), std::string::npos);
  }
}

TEST(Rational, ExactRecovery) {
  auto r = exact_rational(0.5);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, Rational(1, 2));
  EXPECT_TRUE(exact_rational(344.0 / 1179));
  EXPECT_FALSE(exact_rational(std::numbers::pi));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 4) * Rational(2, 3), Rational(1, 3));
}

TEST(Factorization, FirstDerivativeClosedForms) {
  auto f = factor_first_weighting(first_derivative_coefficients(6, 5.0 / 9));
  EXPECT_DOUBLE_EQ(f.c_first, 2.0);
  EXPECT_NEAR(f.c_second, 8.0, 1e-12);

  auto g = factor_first_weighting(first_derivative_coefficients(8));
  EXPECT_NEAR(g.c_first, 8 - std::sqrt(30.0), 1e-12);
  EXPECT_NEAR(g.c_second, 8 + std::sqrt(30.0), 1e-12);
  EXPECT_NEAR((g.c_first + 2) * (g.c_second + 2), 70.0, 1e-11);
  auto k = first_derivative_coefficients(8);
  EXPECT_NEAR(k.beta / k.normalization(), 1.0 / 70, 1e-15);
}

TEST(Factorization, SecondDerivativeBoundary) {
  auto f = factor_second_weighting(second_derivative_coefficients(6, 60.0 / 113));
  EXPECT_NEAR(std::min(f.c_first, f.c_second), 2.0, 1e-12);
  auto g = factor_second_weighting(second_derivative_coefficients(8));
  EXPECT_GE(g.c_first, 2.0);
  EXPECT_LE(g.c_first, g.c_second);
}

TEST(Factorization, CompositionReproducesPentadiagonalWeighting) {
  std::vector<CoefficientSet> sets;
  for (double al : {0.34, 0.4, 4.0 / 9, 0.5, 5.0 / 9}) sets.push_back(first_derivative_coefficients(6, al));
  for (double al : {0.19, 0.25, 1.0 / 3, 344.0 / 1179, 0.5, 60.0 / 113}) sets.push_back(second_derivative_coefficients(6, al));
  for (const auto& k : sets) {
    auto f = k.derivative_order == 1 ? factor_first_weighting(k) : factor_second_weighting(k);
    EXPECT_GE(f.c_first, 2.0);
    for (std::size_t n : {8u, 16u, 33u}) {
      Eigen::MatrixXd prod = dense_weight(n, f.c_first) * dense_weight(n, f.c_second);
      EXPECT_LE((prod - dense_penta(n, k)).cwiseAbs().maxCoeff(), 1e-13) << "alpha " << k.alpha << " n " << n;
    }
  }
}

TEST(Factorization, AlphaMakingCBelowTwoIsRejected) {
  CoefficientSet k = first_derivative_coefficients(6, 0.5);
  k.alpha = 0.6;
  EXPECT_THROW(factor_first_weighting(k), std::domain_error);
}

TEST(Weighting, ApplyExample) {
  WeightOperator w(4, 4.0);
  Field out = apply_weighting(w, Field{0, 1, 0, 0});
  Field expect{1.0 / 6, 2.0 / 3, 1.0 / 6, 0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(out[i], expect[i], 1e-16);
  Field back = solve_weighting(w, expect);
  Field unit{0, 1, 0, 0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back[i], unit[i], 1e-15);
}

TEST(Weighting, ConstantsAreFixedPoints) {
  for (double c : {2.0, 4.0, 10.0, 13.47}) {
    WeightOperator w(9, c);
    Field k(9, 0.7);
    for (double v : apply_weighting(w, k)) EXPECT_DOUBLE_EQ(v, 0.7);
    for (double v : solve_weighting(w, k)) EXPECT_NEAR(v, 0.7, 1e-15);
  }
}

TEST(Weighting, RoundTripResidualAndMean) {
  for (std::size_t n : {3u, 4u, 7u, 50u, 257u}) {
    for (double c : {2.0, 4.0, 10.0}) {
      if (c == 2.0 && n % 2 == 0) continue;
      WeightOperator w(n, c);
      Field u = random_field(n, static_cast<unsigned>(n * 13 + c));
      Field m = apply_weighting(w, u);
      Field back = solve_weighting(w, m);
      double su = 0, sm = 0, sb = 0;
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(back[i], u[i], 1e-12);
        su += u[i];
        sm += m[i];
        sb += back[i];
      }
      EXPECT_NEAR(su, sm, 1e-12);
      EXPECT_NEAR(sm, sb, 1e-12);
      // residual contract against a dense product
      Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(back.data(), n);
      Eigen::VectorXd r = dense_weight(n, c) * x - Eigen::Map<Eigen::VectorXd>(m.data(), n);
      EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, Eigen::Map<Eigen::VectorXd>(m.data(), n).cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Weighting, EvenPeriodicWithCTwoIsSingular) {
  EXPECT_THROW(WeightOperator(8, 2.0), std::domain_error);
  EXPECT_NO_THROW(WeightOperator(9, 2.0));
  EXPECT_NO_THROW(WeightOperator(8, 2.0, Topology::truncated));
  EXPECT_NO_THROW(WeightOperator(8, 2.0, Topology::dirichlet_rectangular));
}

TEST(Weighting, CirculantsCommute) {
  WeightOperator w1(20, 4.0), w2(20, 10.0);
  Field u = random_field(20, 3);
  Field a = apply_weighting(w1, apply_weighting(w2, u));
  Field b = apply_weighting(w2, apply_weighting(w1, u));
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(a[i], b[i], 1e-13);
}

TEST(Weighting, SizeMismatchAndSmallC) {
  WeightOperator w(5, 4.0);
  EXPECT_THROW(apply_weighting(w, Field(4)), SizeMismatch);
  EXPECT_THROW(solve_weighting(w, Field(6)), SizeMismatch);
  EXPECT_THROW(WeightOperator(5, 1.5), std::domain_error);
}

TEST(Weighting, RectangularAndTruncatedAgainstDense) {
  const std::size_t n = 7;
  WeightOperator rect(n, 4.0, Topology::dirichlet_rectangular);
  WeightOperator trunc(n, 10.0, Topology::truncated);
  Field full = random_field(n + 2, 11);
  Field out = apply_weighting(rect, full);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(out[i], (full[i] + 4 * full[i + 1] + full[i + 2]) / 6, 1e-15);
  Field inner(full.begin() + 1, full.end() - 1);
  Field back = solve_weighting(rect, out, full.front(), full.back());
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], inner[i], 1e-13);

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    T(i, i) = 10;
    if (i > 0) T(i, i - 1) = 1;
    if (i + 1 < n) T(i, i + 1) = 1;
    T.row(i) /= T.row(i).sum();
  }
  Field v = apply_weighting(trunc, inner);
  Eigen::VectorXd ref = T * Eigen::Map<Eigen::VectorXd>(inner.data(), n);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(v[i], ref[i], 1e-15);
  Field vb = solve_weighting(trunc, v);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(vb[i], inner[i], 1e-13);
}

TEST(Stencils, SumsAndSymmetry) {
  for (int order : {4, 6, 8}) {
    auto d1 = difference_stencil(first_derivative_coefficients(order));
    auto d2 = difference_stencil(second_derivative_coefficients(order));
    double s1 = 0, s2 = 0;
    for (int k = 0; k < 5; ++k) {
      s1 += d1.weights[k];
      s2 += d2.weights[k];
      EXPECT_DOUBLE_EQ(d1.weights[k], -d1.weights[4 - k]);
      EXPECT_DOUBLE_EQ(d2.weights[k], d2.weights[4 - k]);
    }
    EXPECT_NEAR(s1, 0, 1e-15);
    EXPECT_NEAR(s2, 0, 1e-15);
  }
  auto d = difference_stencil(first_derivative_coefficients(4));
  EXPECT_DOUBLE_EQ(d.weights[3], 0.5);
  auto dd = difference_stencil(second_derivative_coefficients(4));
  EXPECT_DOUBLE_EQ(dd.weights[2], -2.0);
  EXPECT_DOUBLE_EQ(dd.weights[3], 1.0);
}

TEST(CompactDerivative, ConstantsMapToZero) {
  for (int order : {4, 6, 8})
    for (double v : compact_derivative(first_derivative_coefficients(order), Field(16, 3.0), 0.1)) EXPECT_NEAR(v, 0, 1e-12);
}

TEST(CompactDerivative, ConvergenceFactors) {
  double r4 = sin_error(first_derivative_coefficients(4), 40) / sin_error(first_derivative_coefficients(4), 80);
  EXPECT_GE(r4, 14);
  EXPECT_LE(r4, 18);
  double r8 = sin_error(first_derivative_coefficients(8), 20) / sin_error(first_derivative_coefficients(8), 40);
  EXPECT_GE(r8, 200);
  EXPECT_LE(r8, 320);
  double q4 = sin_error(second_derivative_coefficients(4), 40) / sin_error(second_derivative_coefficients(4), 80);
  EXPECT_GE(q4, 14);
  EXPECT_LE(q4, 18);
  double q6 = sin_error(second_derivative_coefficients(6), 20) / sin_error(second_derivative_coefficients(6), 40);
  EXPECT_GE(q6, 50);
  EXPECT_LE(q6, 80);
}

TEST(CompactDerivative, MatchesModifiedWavenumber) {
  // sin(kx) maps to k'(k) cos(kx) with k' h = (a sin kh + (b/2) sin 2kh) / (1 + 2 alpha cos kh + 2 beta cos 2kh)
  const std::size_t n = 64;
  const double dx = 2 * std::numbers::pi / n;
  for (int order : {4, 6, 8}) {
    auto k = first_derivative_coefficients(order);
    for (int mode : {1, 5, 17}) {
      Field f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(mode * (i + 1) * dx);
      Field d = compact_derivative(k, f, dx);
      const double kh = mode * dx;
      const double kp = (k.a * std::sin(kh) + 0.5 * k.b * std::sin(2 * kh)) /
                        (1 + 2 * k.alpha * std::cos(kh) + 2 * k.beta * std::cos(2 * kh)) / dx;
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(d[i], kp * std::cos(mode * (i + 1) * dx), 1e-11);
    }
  }
}
