#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "cbp/boundary.hpp"
#include "cbp/problems.hpp"
#include "dense.hpp"

using namespace cbp;

namespace {

ProblemSpec1D inflow_problem(double left = 0.5) {
  ProblemSpec1D p;
  p.flux = burgers_law(1.0);
  p.initial = [](double x) { return 0.5 + 0.5 * std::sin(x); };
  p.left = [left](double) { return left; };
  p.x_hi = 2 * std::numbers::pi;
  p.boundary = BoundaryKind::inflow_outflow;
  p.bounds = Bounds::of(0.0, 1.0);
  return p;
}

ProblemSpec1D dirichlet_problem(double c, double d, double left, double right) {
  ProblemSpec1D p;
  p.flux = linear_law(c);
  p.diffusion = linear_law(d);
  p.left = [left](double) { return left; };
  p.right = [right](double) { return right; };
  p.x_hi = 2 * std::numbers::pi;
  p.boundary = BoundaryKind::dirichlet;
  p.bounds = Bounds::of(-1.0, 1.0);
  return p;
}

/// N x (N+2) matrix from a left edge row, an interior row and a right edge row.
Eigen::MatrixXd assemble(Eigen::Index n, std::initializer_list<double> first, std::initializer_list<double> interior,
                         std::initializer_list<double> last) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n + 2);
  Eigen::Index k = 0;
  for (double v : first) A(0, k++) = v;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    k = i - 1;
    for (double v : interior) A(i, k++) = v;
  }
  k = n - 2;
  for (double v : last) A(n - 1, k++) = v;
  return A;
}

/// Printed rows: weighting over 72, first difference over 24, second difference over 6.
Eigen::MatrixXd dirichlet_w(Eigen::Index n) {
  return assemble(n, {24.0 / 5, 246.0 / 5, 84.0 / 5, 6.0 / 5}, {1, 14, 42, 14, 1}, {6.0 / 5, 84.0 / 5, 246.0 / 5, 24.0 / 5}) / 72;
}
Eigen::MatrixXd dirichlet_dx(Eigen::Index n) {
  return assemble(n, {-38.0 / 5, -42.0 / 5, 78.0 / 5, 2.0 / 5}, {-1, -10, 0, 10, 1}, {-2.0 / 5, -78.0 / 5, 42.0 / 5, 38.0 / 5}) / 24;
}
Eigen::MatrixXd dirichlet_dxx(Eigen::Index n) {
  return assemble(n, {24.0 / 5, -42.0 / 5, 12.0 / 5, 6.0 / 5}, {1, 2, -6, 2, 1}, {6.0 / 5, 12.0 / 5, -42.0 / 5, 24.0 / 5}) / 6;
}

/// (1,4,1)/6 acting on u_0..u_{N+1}.
Eigen::MatrixXd rect_simpson(Eigen::Index n) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n + 2);
  for (Eigen::Index i = 0; i < n; ++i) A.row(i).segment(i, 3) << 1.0 / 6, 4.0 / 6, 1.0 / 6;
  return A;
}

/// N x N edge-modified (1,10,1)/12 with edge rows (10, 1)/11.
Eigen::MatrixXd truncated_numerov(Eigen::Index n) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) A.row(i).segment(i - 1, 3) << 1.0 / 12, 10.0 / 12, 1.0 / 12;
  A(0, 0) = A(n - 1, n - 1) = 10.0 / 11;
  A(0, 1) = A(n - 1, n - 2) = 1.0 / 11;
  return A;
}

Field grid_values(std::size_t n_interior, double (*fn)(double)) {
  auto x = bounded_grid(0.0, 2 * std::numbers::pi, n_interior);
  Field u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = fn(x[i]);
  return u;
}

}  // namespace

TEST(OutflowExtrapolate, Examples) {
  Bounds b = Bounds::of(0.0, 1.0);
  EXPECT_NEAR(outflow_extrapolate(Field{0.3, 0.3, 0.3, 0.3}, b), 0.3, 1e-15);
  Bounds wide = Bounds::of(0.0, 100.0);
  EXPECT_NEAR(outflow_extrapolate(Field{17, 18, 19, 20}, wide), 21.0, 1e-12);
  // cubic point values: the extrapolant is exact for their Simpson means
  auto cubic = [](double x) { return 0.1 * x * x * x - x + 2; };
  Field tail(4);
  for (int j = 0; j < 4; ++j) tail[j] = (cubic(j - 1.0) + 4 * cubic(j) + cubic(j + 1.0)) / 6;
  EXPECT_NEAR(outflow_extrapolate(tail, Bounds::of(-100, 100)), cubic(4.0), 1e-12);
  Field clamp{0.86, 0.86, 0.86, 0.92};
  EXPECT_NEAR(outflow_extrapolate(clamp, b, false), 1.07, 1e-12);
  EXPECT_EQ(outflow_extrapolate(clamp, b), 1.0);
  EXPECT_THROW(outflow_extrapolate(Field{1, 2, 3}, b), SizeMismatch);
}

TEST(InflowOutflow, ConstantStateIsStationary) {
  Field u(34, 0.5);
  InflowOutflowScheme s(inflow_problem(0.5), 32);
  auto r = inflow_outflow_step(u, 0.0, s.forward_euler_dt(), inflow_problem(0.5));
  for (double v : r.u) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(InflowOutflow, StepMatchesDenseOracle) {
  const Eigen::Index n = 30;
  auto p = inflow_problem(0.25);
  InflowOutflowScheme s(p, n);
  Field u = grid_values(n, [](double x) { return 0.5 + 0.4 * std::sin(x); });
  u.front() = 0.25;
  const double dt = s.forward_euler_dt(), lambda = dt / s.dx();
  auto r = inflow_outflow_step(u, 0.0, dt, p, false);

  Eigen::VectorXd x = test::vec(u), f = x.array().square() / 2;
  Eigen::MatrixXd W = rect_simpson(n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n + 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = -0.5;
    D(i, i + 2) = 0.5;
  }
  Eigen::VectorXd means = W * x - lambda * D * f;
  const double right = -2.0 / 3 * means(n - 4) + 17.0 / 6 * means(n - 3) - 14.0 / 3 * means(n - 2) + 3.5 * means(n - 1);
  Eigen::VectorXd rhs = means;
  rhs(0) -= 0.25 / 6;
  rhs(n - 1) -= right / 6;
  Eigen::VectorXd inner = W.block(0, 1, n, n).partialPivLu().solve(rhs);
  EXPECT_EQ(r.u.front(), 0.25);
  EXPECT_NEAR(r.u.back(), right, 1e-14);
  for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(r.u[i + 1], inner(i), 1e-14) << i;
}

TEST(InflowOutflow, LimitedStepDataStaysInBounds) {
  const std::size_t n = 40;
  auto p = inflow_problem(1.0);
  InflowOutflowScheme s(p, n);
  Field u = grid_values(n, [](double x) { return x < 2.0 ? 1.0 : 0.0; });
  for (int step = 0; step < 30; ++step) {
    auto r = inflow_outflow_step(u, 0.0, s.forward_euler_dt(), p);
    for (double v : r.u) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    u = r.u;
  }
}

TEST(InflowOutflow, RejectsInvalidSetups) {
  auto p = inflow_problem();
  p.flux = linear_law(-1.0);
  EXPECT_THROW(InflowOutflowScheme(p, 16), std::domain_error);
  EXPECT_THROW(inflow_outflow_step(Field(18, 0.5), 0.0, 1.0, inflow_problem()), CflViolation);
  EXPECT_THROW(inflow_outflow_step(Field(18, 0.5), 0.0, 0.01, inflow_problem(1.5)), std::domain_error);
}

TEST(DirichletOperators, PrintedRows) {
  using D = DirichletOperators;
  const std::array<double, 4> w{24.0 / 5 / 72, 246.0 / 5 / 72, 84.0 / 5 / 72, 6.0 / 5 / 72};
  const std::array<double, 4> dx{-38.0 / 5 / 24, -42.0 / 5 / 24, 78.0 / 5 / 24, 2.0 / 5 / 24};
  const std::array<double, 4> dxx{24.0 / 5 / 6, -42.0 / 5 / 6, 12.0 / 5 / 6, 6.0 / 5 / 6};
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(D::w_first[k], w[k]);
    EXPECT_DOUBLE_EQ(D::dx_first[k], dx[k]);
    EXPECT_DOUBLE_EQ(D::dxx_first[k], dxx[k]);
  }
}

TEST(DirichletOperators, RowSums) {
  using D = DirichletOperators;
  auto total = [](const auto& r) {
    double s = 0;
    for (double v : r) s += v;
    return s;
  };
  EXPECT_NEAR(total(D::w_first), 1.0, 1e-15);
  EXPECT_NEAR(total(D::w_interior), 1.0, 1e-15);
  EXPECT_NEAR(total(D::dx_first), 0.0, 1e-15);
  EXPECT_NEAR(total(D::dx_interior), 0.0, 1e-15);
  EXPECT_NEAR(total(D::dx_last), 0.0, 1e-15);
  EXPECT_NEAR(total(D::dxx_first), 0.0, 1e-15);
  EXPECT_NEAR(total(D::dxx_interior), 0.0, 1e-15);
}

TEST(DirichletOperators, PolynomialConsistency) {
  // with h = 1 the rows satisfy Dx p = W p' and Dxx p = W p'' on polynomials: degree <= 3 at the
  // edges and <= 4 inside
  const Eigen::Index n = 8;
  Eigen::MatrixXd W = dirichlet_w(n), Dx = dirichlet_dx(n), Dxx = dirichlet_dxx(n);
  for (int deg = 0; deg <= 4; ++deg) {
    Eigen::VectorXd p(n + 2), dp(n + 2), d2p(n + 2);
    for (Eigen::Index i = 0; i < n + 2; ++i) {
      const double x = static_cast<double>(i) - 2.5;
      p(i) = std::pow(x, deg);
      dp(i) = deg > 0 ? deg * std::pow(x, deg - 1) : 0.0;
      d2p(i) = deg > 1 ? deg * (deg - 1) * std::pow(x, deg - 2) : 0.0;
    }
    Eigen::VectorXd e1 = Dx * p - W * dp, e2 = Dxx * p - W * d2p;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool edge = i == 0 || i == n - 1;
      if (edge && deg == 4) continue;
      EXPECT_NEAR(e1(i), 0.0, 1e-11) << "deg " << deg << " row " << i;
      EXPECT_NEAR(e2(i), 0.0, 1e-11) << "deg " << deg << " row " << i;
    }
  }
}

TEST(DirichletOperators, AppliedRowsMatchAssembly) {
  const Eigen::Index n = 11;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> d(-1, 1);
  Field v(n + 2);
  for (auto& x : v) x = d(gen);
  EXPECT_LE(test::max_diff(DirichletOperators::weighting(v), dirichlet_w(n) * test::vec(v)), 1e-15);
  EXPECT_LE(test::max_diff(DirichletOperators::first_difference(v), dirichlet_dx(n) * test::vec(v)), 1e-15);
  EXPECT_LE(test::max_diff(DirichletOperators::second_difference(v), dirichlet_dxx(n) * test::vec(v)), 1e-15);
}

TEST(DirichletOperators, FactorizationReproducesReconstructionWeighting) {
  for (Eigen::Index n : {6, 17, 40}) {
    // w = K W~ u + u_bc with K = diag(10/11, 1, ..., 1, 10/11) and u_bc = (u_0/11, 0, ..., 0, u_{N+1}/11)
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n, n);
    K(0, 0) = K(n - 1, n - 1) = 10.0 / 11;
    Eigen::MatrixXd target = K * dirichlet_w(n);
    target(0, 0) += 1.0 / 11;
    target(n - 1, n + 1) += 1.0 / 11;
    Eigen::MatrixXd product = truncated_numerov(n) * rect_simpson(n);
    EXPECT_LE((product - target).cwiseAbs().maxCoeff(), 1e-13) << n;
    // every w row is a convex combination of point values
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_GE(target.row(i).minCoeff(), 0.0);
      EXPECT_NEAR(target.row(i).sum(), 1.0, 1e-15);
    }
  }
}

TEST(Dirichlet, ConstantStateIsStationary) {
  auto p = dirichlet_problem(1.0, 0.1, 0.3, 0.3);
  DirichletScheme s(p, 24);
  auto r = dirichlet_convdiff_step(Field(26, 0.3), 0.0, s.forward_euler_dt(), p);
  for (double v : r.u) EXPECT_NEAR(v, 0.3, 1e-15);
}

TEST(Dirichlet, StepMatchesDenseOracle) {
  const Eigen::Index n = 25;
  const double c = 1.0, d = 0.05, left = 0.2, right = -0.4;
  auto p = dirichlet_problem(c, d, left, right);
  DirichletScheme s(p, n);
  Field u = grid_values(n, [](double x) { return 0.6 * std::cos(x) - 0.1 * std::sin(3 * x); });
  u.front() = left;
  u.back() = right;
  const double dt = s.forward_euler_dt(), lambda = dt / s.dx(), mu = dt / (s.dx() * s.dx());
  auto r = dirichlet_convdiff_step(u, 0.0, dt, p, false);

  Eigen::VectorXd x = test::vec(u);
  Eigen::VectorXd means = dirichlet_w(n) * x - lambda * dirichlet_dx(n) * (c * x) + mu * dirichlet_dxx(n) * (d * x);
  Eigen::VectorXd w = means;
  w(0) = 10.0 / 11 * means(0) + left / 11;
  w(n - 1) = 10.0 / 11 * means(n - 1) + right / 11;
  Eigen::VectorXd v = truncated_numerov(n).partialPivLu().solve(w);
  v(0) -= left / 6;
  v(n - 1) -= right / 6;
  Eigen::VectorXd inner = rect_simpson(n).block(0, 1, n, n).partialPivLu().solve(v);
  EXPECT_EQ(r.u.front(), left);
  EXPECT_EQ(r.u.back(), right);
  for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(r.u[i + 1], inner(i), 1e-13) << i;
}

TEST(Dirichlet, CflConstants) {
  auto p = dirichlet_problem(2.0, 0.5, 0.0, 0.0);
  DirichletScheme s(p, 20);
  const double h = s.dx();
  EXPECT_DOUBLE_EQ(s.forward_euler_dt(), std::min(4.0 / 19 * h / 2.0, 695.0 / 1596 * h * h / 0.5));
  EXPECT_THROW(dirichlet_convdiff_step(Field(22, 0.0), 0.0, 1.01 * s.forward_euler_dt(), p), CflViolation);
}

TEST(Dirichlet, BoundaryDataOutsideBoundsIsAnError) {
  auto p = dirichlet_problem(1.0, 0.1, 1.2, 0.0);
  DirichletScheme s(p, 20);
  EXPECT_THROW(dirichlet_convdiff_step(Field(22, 0.0), 0.0, s.forward_euler_dt(), p), std::domain_error);
}

TEST(Dirichlet, LimitedJumpStaysInBounds) {
  const std::size_t n = 40;
  auto p = dirichlet_problem(1.0, 0.002, 1.0, -1.0);
  DirichletScheme s(p, n);
  Field u = grid_values(n, [](double x) { return x < 3.0 ? 1.0 : -1.0; });
  for (int step = 0; step < 25; ++step) {
    auto r = dirichlet_convdiff_step(u, 0.0, s.forward_euler_dt(), p);
    for (double v : r.u) {
      ASSERT_GE(v, -1.0);
      ASSERT_LE(v, 1.0);
    }
    u = r.u;
  }
}
