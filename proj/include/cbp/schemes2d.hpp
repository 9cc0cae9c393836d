#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/field.hpp"
#include "cbp/limiters.hpp"
#include "cbp/operators.hpp"
#include "cbp/problem.hpp"
#include "cbp/schemes1d.hpp"

namespace cbp {

enum class Axis { x, y };

/// Order in which the two directions are swept inside each cascade level.
enum class SweepPlan { x_then_y, y_then_x };

/// Line-wise operations on an nx x ny row-major (y contiguous) flat field.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {}

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t lines(Axis a) const noexcept { return a == Axis::x ? ny_ : nx_; }
  std::size_t length(Axis a) const noexcept { return a == Axis::x ? nx_ : ny_; }

  template <class T>
  StridedLine<T> line(T* data, Axis a, std::size_t k) const {
    if (a == Axis::x) return {data + k, nx_, static_cast<std::ptrdiff_t>(ny_)};
    return {data + k * ny_, ny_, 1};
  }

  void apply(const WeightOperator& w, Axis a, Field& v) const {
    Field tmp(length(a)), out(length(a));
    for (std::size_t k = 0; k < lines(a); ++k) {
      auto l = line(v.data(), a, k);
      for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = l[i];
      w.apply_to(tmp, out);
      for (std::size_t i = 0; i < out.size(); ++i) l[i] = out[i];
    }
  }

  void solve(const WeightOperator& w, Axis a, Field& v) const {
    for (std::size_t k = 0; k < lines(a); ++k) {
      auto l = line(v.data(), a, k);
      w.solve_into(l, l);
    }
  }

  Field difference(const DiffStencil& d, Axis a, const Field& v) const {
    Field out(v.size());
    Field tmp(length(a)), res(length(a));
    for (std::size_t k = 0; k < lines(a); ++k) {
      auto src = line(v.data(), a, k);
      auto dst = line(out.data(), a, k);
      for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = src[i];
      d.apply_to(tmp, res);
      for (std::size_t i = 0; i < res.size(); ++i) dst[i] = res[i];
    }
    return out;
  }

 private:
  std::size_t nx_, ny_;
};

struct Scheme2DOptions {
  SweepPlan sweep = SweepPlan::x_then_y;
  std::optional<Mode> mode{};
};

/// Fourth-order tensor-product compact scheme for u_t + f_x + g_y = a_xx + b_yy on a periodic
/// rectangle; states are flat Nx*Ny fields (y contiguous).
class PeriodicScheme2D {
 public:
  struct Level {
    Axis axis;
    const WeightOperator* w;
  };

  PeriodicScheme2D(ProblemSpec2D problem, std::size_t nx, std::size_t ny, Scheme2DOptions opts = {})
      : problem_(std::move(problem)),
        grid_(nx, ny),
        dx_((problem_.x_hi - problem_.x_lo) / static_cast<double>(nx)),
        dy_((problem_.y_hi - problem_.y_lo) / static_cast<double>(ny)),
        w1x_(nx, 4.0), w1y_(ny, 4.0), w2x_(nx, 10.0), w2y_(ny, 10.0),
        d1_(difference_stencil(first_derivative_coefficients(4))),
        d2_(difference_stencil(second_derivative_coefficients(4))) {
    const bool conv = problem_.flux_x.active() || problem_.flux_y.active();
    const bool diff = problem_.diffusion_x.active() || problem_.diffusion_y.active();
    if (!conv && !diff) throw std::invalid_argument("2D problem has neither fluxes nor diffusion");
    mode_ = opts.mode.value_or(conv && diff ? Mode::convdiff : (conv ? Mode::convection : Mode::diffusion));
    auto pair = [&](const WeightOperator& a, const WeightOperator& b) {
      if (opts.sweep == SweepPlan::x_then_y) {
        chain_.push_back({Axis::x, &a});
        chain_.push_back({Axis::y, &b});
      } else {
        chain_.push_back({Axis::y, &b});
        chain_.push_back({Axis::x, &a});
      }
    };
    if (mode_ != Mode::diffusion) pair(w1x_, w1y_);
    if (mode_ != Mode::convection) pair(w2x_, w2y_);
  }

  PeriodicScheme2D(const PeriodicScheme2D&) = delete;
  PeriodicScheme2D& operator=(const PeriodicScheme2D&) = delete;

  std::size_t nx() const noexcept { return grid_.nx(); }
  std::size_t ny() const noexcept { return grid_.ny(); }
  double dx() const noexcept { return dx_; }
  double dy() const noexcept { return dy_; }
  Mode mode() const noexcept { return mode_; }
  const ProblemSpec2D& problem() const noexcept { return problem_; }
  const std::vector<Level>& chain() const noexcept { return chain_; }

  std::vector<double> x_grid() const { return periodic_grid(problem_.x_lo, problem_.x_hi, nx()); }
  std::vector<double> y_grid() const { return periodic_grid(problem_.y_lo, problem_.y_hi, ny()); }

  Field sample(const std::function<double(double, double)>& fn) const {
    auto x = x_grid();
    auto y = y_grid();
    Field u(nx() * ny());
    for (std::size_t i = 0; i < nx(); ++i)
      for (std::size_t j = 0; j < ny(); ++j) u[i * ny() + j] = fn(x[i], y[j]);
    return u;
  }

  Field initial() const { return sample(problem_.initial); }

  Field means(std::span<const double> u) const {
    require_size("means", nx() * ny(), u.size());
    Field v(u.begin(), u.end());
    for (std::size_t k = chain_.size(); k-- > 0;) grid_.apply(*chain_[k].w, chain_[k].axis, v);
    return v;
  }

  Field mean_rhs(std::span<const double> u, double /*t*/) const {
    require_size("mean_rhs", nx() * ny(), u.size());
    Field rhs(u.size(), 0.0);
    auto term = [&](const ScalarLaw& law, const DiffStencil& d, Axis a, const WeightOperator* skip, double scale) {
      if (!law.active()) return;
      Field fv(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) fv[i] = law(u[i]);
      Field t = grid_.difference(d, a, fv);
      for (const auto& lvl : chain_)
        if (lvl.w != skip) grid_.apply(*lvl.w, lvl.axis, t);
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += scale * t[i];
    };
    if (mode_ != Mode::diffusion) {
      term(problem_.flux_x, d1_, Axis::x, &w1x_, -1.0 / dx_);
      term(problem_.flux_y, d1_, Axis::y, &w1y_, -1.0 / dy_);
    }
    if (mode_ != Mode::convection) {
      term(problem_.diffusion_x, d2_, Axis::x, &w2x_, 1.0 / (dx_ * dx_));
      term(problem_.diffusion_y, d2_, Axis::y, &w2y_, 1.0 / (dy_ * dy_));
    }
    return rhs;
  }

  Recovered recover(std::span<const double> means, double /*t*/, bool limit) const {
    require_size("recover", nx() * ny(), means.size());
    Recovered r{Field(means.begin(), means.end()), {}};
    for (const auto& lvl : chain_) {
      grid_.solve(*lvl.w, lvl.axis, r.u);
      if (!limit) continue;
      for (std::size_t k = 0; k < grid_.lines(lvl.axis); ++k)
        r.report.merge(limit_bounds_line(grid_.line(r.u.data(), lvl.axis, k), problem_.bounds, lvl.w->c()));
    }
    return r;
  }

  /// Forward-Euler admissible dt from the 2D weak-monotonicity constraints.
  double forward_euler_dt() const {
    const double half = mode_ == Mode::convdiff ? 0.5 : 1.0;
    double dt = std::numeric_limits<double>::infinity();
    if (mode_ != Mode::diffusion) {
      double rate = problem_.flux_x.max_slope / dx_ + problem_.flux_y.max_slope / dy_;
      if (rate > 0.0) dt = std::min(dt, half / 3.0 / rate);
    }
    if (mode_ != Mode::convection) {
      double rate = problem_.diffusion_x.max_slope / (dx_ * dx_) + problem_.diffusion_y.max_slope / (dy_ * dy_);
      if (rate > 0.0) dt = std::min(dt, half * 5.0 / 12.0 / rate);
    }
    return dt;
  }

 private:
  ProblemSpec2D problem_;
  Grid2D grid_;
  double dx_, dy_;
  Mode mode_;
  WeightOperator w1x_, w1y_, w2x_, w2y_;
  DiffStencil d1_, d2_;
  std::vector<Level> chain_;
};

struct Step2DResult {
  Field2D u;
  Field2D means;
  LimiterReport report;
};

namespace detail {

inline Step2DResult euler_step_2d(const Field2D& u, double dt, const ProblemSpec2D& problem, Mode mode, bool limit,
                                  SweepPlan sweep) {
  ProblemSpec2D p = problem;
  p.x_hi = p.x_lo + u.dx() * static_cast<double>(u.nx());
  p.y_hi = p.y_lo + u.dy() * static_cast<double>(u.ny());
  PeriodicScheme2D s(p, u.nx(), u.ny(), {sweep, mode});
  const double admissible = s.forward_euler_dt();
  if (dt > admissible * (1.0 + 1e-12)) throw CflViolation("2D forward-Euler step exceeds its CFL", admissible);
  Field m = s.means(u.values());
  Field rhs = s.mean_rhs(u.values(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] += dt * rhs[i];
  Recovered r = s.recover(m, 0.0, limit);
  Step2DResult out{Field2D(u.nx(), u.ny(), u.dx(), u.dy()), Field2D(u.nx(), u.ny(), u.dx(), u.dy()), r.report};
  out.u.values() = std::move(r.u);
  out.means.values() = std::move(m);
  return out;
}

}  // namespace detail

inline Step2DResult euler_step_2d_convection(const Field2D& u, double dt, const ProblemSpec2D& problem,
                                             bool limit = true, SweepPlan sweep = SweepPlan::x_then_y) {
  return detail::euler_step_2d(u, dt, problem, Mode::convection, limit, sweep);
}

inline Step2DResult euler_step_2d_convdiff(const Field2D& u, double dt, const ProblemSpec2D& problem,
                                           bool limit = true, SweepPlan sweep = SweepPlan::x_then_y) {
  return detail::euler_step_2d(u, dt, problem, Mode::convdiff, limit, sweep);
}

}  // namespace cbp
