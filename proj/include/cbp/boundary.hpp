#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "cbp/errors.hpp"
#include "cbp/limiters.hpp"
#include "cbp/operators.hpp"
#include "cbp/problem.hpp"

namespace cbp {

/// Cubic extrapolation of the outflow point value from the last four (1,4,1)/6 means, clamped.
inline double outflow_extrapolate(std::span<const double> tail, const Bounds& b, bool clamp = true) {
  require_size("outflow_extrapolate", 4, tail.size());
  double v = -2.0 / 3.0 * tail[0] + 17.0 / 6.0 * tail[1] - 14.0 / 3.0 * tail[2] + 3.5 * tail[3];
  return clamp ? std::clamp(v, b.m, b.M) : v;
}

namespace detail {

inline void check_boundary_value(double v, const Bounds& b, const char* which) {
  if (v < b.m - b.tolerance || v > b.M + b.tolerance)
    throw std::domain_error(std::string(which) + " boundary value " + std::to_string(v) + " outside the bounds");
}

}  // namespace detail

/// Fourth-order compact scheme for u_t + f(u)_x = 0 with inflow data at the left end and an
/// extrapolated outflow value at the right end. State: u_0 .. u_{N+1}.
class InflowOutflowScheme {
 public:
  InflowOutflowScheme(ProblemSpec1D problem, std::size_t n)
      : problem_(std::move(problem)), n_(n), dx_(problem_.length() / static_cast<double>(n + 1)),
        w_(n, 4.0, Topology::dirichlet_rectangular) {
    if (n < 4) throw std::invalid_argument("inflow-outflow scheme needs at least 4 interior points");
    if (!problem_.flux.active() || !problem_.left) throw std::invalid_argument("inflow-outflow needs a flux and L(t)");
    const Bounds& b = problem_.bounds;
    for (int k = 0; k <= 100; ++k) {
      double u = b.m + (b.M - b.m) * k / 100.0;
      if (problem_.flux.derivative(u) < -1e-14)
        throw std::domain_error("inflow-outflow treatment needs f' >= 0 on [m, M]");
    }
  }

  std::size_t size() const noexcept { return n_ + 2; }
  std::size_t interior() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  const ProblemSpec1D& problem() const noexcept { return problem_; }
  std::vector<double> grid() const { return bounded_grid(problem_.x_lo, problem_.x_hi, n_); }

  Field means(std::span<const double> u) const {
    require_size("means", n_ + 2, u.size());
    Field out(n_);
    w_.apply_to(u, out);
    return out;
  }

  Field mean_rhs(std::span<const double> u, double /*t*/) const {
    require_size("mean_rhs", n_ + 2, u.size());
    Field rhs(n_);
    for (std::size_t i = 0; i < n_; ++i) rhs[i] = -(problem_.flux(u[i + 2]) - problem_.flux(u[i])) / (2.0 * dx_);
    return rhs;
  }

  Recovered recover(std::span<const double> means, double t, bool limit) const {
    require_size("recover", n_, means.size());
    const Bounds& b = problem_.bounds;
    Recovered r{Field(n_ + 2), {}};
    const double left = problem_.left(t);
    detail::check_boundary_value(left, b, "inflow");
    if (!(problem_.flux.derivative(left) > 0.0)) throw std::domain_error("inflow boundary needs f'(L(t)) > 0");
    const double right = outflow_extrapolate(means.subspan(n_ - 4, 4), b, limit);
    std::span<double> inner(r.u.data() + 1, n_);
    w_.solve_into(means, inner, left, right);
    if (limit) r.report = limit_bounds_line(inner, b, 4.0, LineEdges::fixed(left, right));
    r.u.front() = left;
    r.u.back() = right;
    return r;
  }

  double forward_euler_dt() const {
    const double s = problem_.flux.max_slope;
    return s > 0.0 ? dx_ / (3.0 * s) : std::numeric_limits<double>::infinity();
  }

 private:
  ProblemSpec1D problem_;
  std::size_t n_;
  double dx_;
  WeightOperator w_;
};

/// Rows of the third-order Dirichlet boundary scheme; edge rows act on u_0..u_3, interior rows
/// on u_{i-2}..u_{i+2}, and the right edge mirrors the left one.
struct DirichletOperators {
  static constexpr std::array<double, 4> w_first{24.0 / 5 / 72, 246.0 / 5 / 72, 84.0 / 5 / 72, 6.0 / 5 / 72};
  static constexpr std::array<double, 5> w_interior{1.0 / 72, 14.0 / 72, 42.0 / 72, 14.0 / 72, 1.0 / 72};
  static constexpr std::array<double, 4> dx_first{-38.0 / 5 / 24, -42.0 / 5 / 24, 78.0 / 5 / 24, 2.0 / 5 / 24};
  static constexpr std::array<double, 5> dx_interior{-1.0 / 24, -10.0 / 24, 0.0, 10.0 / 24, 1.0 / 24};
  static constexpr std::array<double, 4> dx_last{-2.0 / 5 / 24, -78.0 / 5 / 24, 42.0 / 5 / 24, 38.0 / 5 / 24};
  static constexpr std::array<double, 4> dxx_first{24.0 / 5 / 6, -42.0 / 5 / 6, 12.0 / 5 / 6, 6.0 / 5 / 6};
  static constexpr std::array<double, 5> dxx_interior{1.0 / 6, 2.0 / 6, -6.0 / 6, 2.0 / 6, 1.0 / 6};

  /// out_i (i = 1..N) from a full vector v_0..v_{N+1}.
  static void apply(const std::array<double, 4>& first, const std::array<double, 5>& interior,
                    const std::array<double, 4>& last, std::span<const double> v, std::span<double> out) {
    const std::size_t n = out.size();
    out[0] = first[0] * v[0] + first[1] * v[1] + first[2] * v[2] + first[3] * v[3];
    for (std::size_t i = 2; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += interior[k] * v[i - 2 + k];
      out[i - 1] = s;
    }
    out[n - 1] = last[0] * v[n - 2] + last[1] * v[n - 1] + last[2] * v[n] + last[3] * v[n + 1];
  }

  static constexpr std::array<double, 4> reversed(const std::array<double, 4>& r) { return {r[3], r[2], r[1], r[0]}; }

  static Field weighting(std::span<const double> v) {
    Field out(v.size() - 2);
    apply(w_first, w_interior, reversed(w_first), v, out);
    return out;
  }
  static Field first_difference(std::span<const double> f) {
    Field out(f.size() - 2);
    apply(dx_first, dx_interior, dx_last, f, out);
    return out;
  }
  static Field second_difference(std::span<const double> g) {
    Field out(g.size() - 2);
    apply(dxx_first, dxx_interior, reversed(dxx_first), g, out);
    return out;
  }
};

/// Third-order-boundary compact scheme for u_t + f(u)_x = g(u)_xx with Dirichlet data.
/// State: u_0 .. u_{N+1}.
class DirichletScheme {
 public:
  DirichletScheme(ProblemSpec1D problem, std::size_t n)
      : problem_(std::move(problem)), n_(n), dx_(problem_.length() / static_cast<double>(n + 1)),
        w2_(n, 10.0, Topology::truncated), w1_(n, 4.0, Topology::dirichlet_rectangular) {
    if (n < 4) throw std::invalid_argument("Dirichlet scheme needs at least 4 interior points");
    if (!problem_.left || !problem_.right) throw std::invalid_argument("Dirichlet scheme needs L(t) and R(t)");
  }

  std::size_t size() const noexcept { return n_ + 2; }
  std::size_t interior() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  const ProblemSpec1D& problem() const noexcept { return problem_; }
  std::vector<double> grid() const { return bounded_grid(problem_.x_lo, problem_.x_hi, n_); }

  Field means(std::span<const double> u) const {
    require_size("means", n_ + 2, u.size());
    return DirichletOperators::weighting(u);
  }

  Field mean_rhs(std::span<const double> u, double /*t*/) const {
    require_size("mean_rhs", n_ + 2, u.size());
    Field rhs(n_, 0.0);
    if (problem_.flux.active()) {
      Field f(n_ + 2);
      for (std::size_t i = 0; i < n_ + 2; ++i) f[i] = problem_.flux(u[i]);
      Field d = DirichletOperators::first_difference(f);
      for (std::size_t i = 0; i < n_; ++i) rhs[i] -= d[i] / dx_;
    }
    if (problem_.diffusion.active()) {
      Field g(n_ + 2);
      for (std::size_t i = 0; i < n_ + 2; ++i) g[i] = problem_.diffusion(u[i]);
      Field d = DirichletOperators::second_difference(g);
      for (std::size_t i = 0; i < n_; ++i) rhs[i] += d[i] / (dx_ * dx_);
    }
    return rhs;
  }

  /// The four-step recovery: w = K means + u_bc/11, v = W~2^{-1} w (limit at c=10), point values
  /// from the (1,4,1)/6 system with boundary data moved right (limit at c=4).
  Recovered recover(std::span<const double> means, double t, bool limit) const {
    require_size("recover", n_, means.size());
    const Bounds& b = problem_.bounds;
    const double left = problem_.left(t), right = problem_.right(t);
    detail::check_boundary_value(left, b, "left");
    detail::check_boundary_value(right, b, "right");
    Recovered r{Field(n_ + 2), {}};
    std::span<double> inner(r.u.data() + 1, n_);
    for (std::size_t i = 0; i < n_; ++i) inner[i] = means[i];
    inner[0] = 10.0 / 11.0 * means[0] + left / 11.0;
    inner[n_ - 1] = 10.0 / 11.0 * means[n_ - 1] + right / 11.0;
    w2_.solve_into(inner, inner);
    if (limit) r.report.merge(limit_bounds_line(inner, b, 10.0, LineEdges::absent()));
    w1_.solve_into(inner, inner, left, right);
    if (limit) r.report.merge(limit_bounds_line(inner, b, 4.0, LineEdges::fixed(left, right)));
    r.u.front() = left;
    r.u.back() = right;
    return r;
  }

  double forward_euler_dt() const {
    double dt = std::numeric_limits<double>::infinity();
    if (problem_.flux.active() && problem_.flux.max_slope > 0.0)
      dt = std::min(dt, 4.0 / 19.0 * dx_ / problem_.flux.max_slope);
    if (problem_.diffusion.active() && problem_.diffusion.max_slope > 0.0)
      dt = std::min(dt, 695.0 / 1596.0 * dx_ * dx_ / problem_.diffusion.max_slope);
    return dt;
  }

 private:
  ProblemSpec1D problem_;
  std::size_t n_;
  double dx_;
  WeightOperator w2_;
  WeightOperator w1_;
};

namespace detail {

template <class Scheme>
Recovered bounded_euler_step(const Scheme& s, std::span<const double> u, double t, double dt, bool limit) {
  const double admissible = s.forward_euler_dt();
  if (dt > admissible * (1.0 + 1e-12)) throw CflViolation("boundary scheme step exceeds its CFL", admissible);
  Field m = s.means(u);
  Field rhs = s.mean_rhs(u, t);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] += dt * rhs[i];
  return s.recover(m, t + dt, limit);
}

}  // namespace detail

/// One forward-Euler step of the inflow-outflow scheme from time t.
inline Recovered inflow_outflow_step(std::span<const double> u, double t, double dt, const ProblemSpec1D& problem,
                                     bool limit = true) {
  return detail::bounded_euler_step(InflowOutflowScheme(problem, u.size() - 2), u, t, dt, limit);
}

/// One forward-Euler step of the Dirichlet convection-diffusion scheme from time t.
inline Recovered dirichlet_convdiff_step(std::span<const double> u, double t, double dt, const ProblemSpec1D& problem,
                                         bool limit = true) {
  return detail::bounded_euler_step(DirichletScheme(problem, u.size() - 2), u, t, dt, limit);
}

}  // namespace cbp
