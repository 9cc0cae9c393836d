#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/limiters.hpp"
#include "cbp/operators.hpp"
#include "cbp/problem.hpp"
#include "cbp/tvb.hpp"

namespace cbp {

enum class Mode { convection, diffusion, convdiff };

/// How the convective constraint scales with the mesh: dx (CFL) or dx^2 (order-verification runs).
enum class DtScale { cfl, dx2 };

inline Mode mode_of(const ScalarLaw& flux, const ScalarLaw& diffusion) {
  if (flux.active() && diffusion.active()) return Mode::convdiff;
  if (diffusion.active()) return Mode::diffusion;
  if (flux.active()) return Mode::convection;
  throw std::invalid_argument("problem has neither flux nor diffusion");
}

struct GridContext {
  double dx = 0.0;
  int order = 4;
  std::optional<double> alpha1{};
  std::optional<double> alpha2{};
  DtScale scale = DtScale::cfl;
  double cap = std::numeric_limits<double>::infinity();
};

/// Largest dt = C * (forward-Euler weak-monotonicity bound) over the invariant region [m, M].
inline double max_stable_dt(const ProblemSpec1D& problem, const GridContext& g, Mode mode, double ssp_coefficient) {
  const double half = mode == Mode::convdiff ? 0.5 : 1.0;
  double dt = std::numeric_limits<double>::infinity();
  if (mode != Mode::diffusion && problem.flux.max_slope > 0.0) {
    double cfl = first_derivative_coefficients(g.order, g.alpha1).cfl_factor * half;
    double h = g.scale == DtScale::dx2 ? g.dx * g.dx : g.dx;
    dt = std::min(dt, cfl * h / problem.flux.max_slope);
  }
  if (mode != Mode::convection && problem.diffusion.max_slope > 0.0) {
    double cfl = second_derivative_coefficients(g.order, g.alpha2).cfl_factor * half;
    dt = std::min(dt, cfl * g.dx * g.dx / problem.diffusion.max_slope);
  }
  if (!std::isfinite(dt)) return g.cap;
  return ssp_coefficient * dt;
}

struct SchemeOptions {
  int order = 4;
  std::optional<double> alpha1{};
  std::optional<double> alpha2{};
  std::optional<double> tvb_p{};  // TVB flux limiting (order 4, convection only)
  std::optional<Mode> mode{};     // defaults to what the problem carries
  std::optional<double> dx{};     // defaults to the periodic grid spacing
};

/// Semi-discretization of u_t + f(u)_x = a(u)_xx on a periodic grid, written for the weighted
/// means: means = W u, d(means)/dt = mean_rhs(u), and recover() inverts W level by level.
class PeriodicScheme1D {
 public:
  PeriodicScheme1D(ProblemSpec1D problem, std::size_t n, SchemeOptions opts = {})
      : problem_(std::move(problem)),
        n_(n),
        dx_(opts.dx.value_or(problem_.length() / static_cast<double>(n))),
        opts_(opts),
        mode_(opts.mode.value_or(mode_of(problem_.flux, problem_.diffusion))),
        first_(first_derivative_coefficients(opts.order, opts.alpha1)),
        second_(second_derivative_coefficients(opts.order, opts.alpha2)) {
    if (n < (opts.order == 4 ? 3u : 5u)) throw std::invalid_argument("periodic grid too small: " + std::to_string(n));
    if (mode_ != Mode::diffusion) {
      if (!problem_.flux.active()) throw std::invalid_argument("convection mode needs a flux");
      conv_chain_ = weight_chain(first_, n);
      conv_stencil_ = difference_stencil(first_);
    }
    if (mode_ != Mode::convection) {
      if (!problem_.diffusion.active()) throw std::invalid_argument("diffusion mode needs a diffusion function");
      diff_chain_ = weight_chain(second_, n);
      diff_stencil_ = difference_stencil(second_);
    }
    if (opts_.tvb_p) {
      if (mode_ != Mode::convection) throw std::invalid_argument("TVB limiting is only defined for pure convection");
      if (opts_.order != 4) throw std::invalid_argument("TVB limiting is only defined for the fourth-order scheme");
    }
    chain_ = diff_chain_;
    chain_.insert(chain_.end(), conv_chain_.begin(), conv_chain_.end());
  }

  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  Mode mode() const noexcept { return mode_; }
  const ProblemSpec1D& problem() const noexcept { return problem_; }
  const Bounds& bounds() const noexcept { return problem_.bounds; }
  const CoefficientSet& first() const noexcept { return first_; }
  const CoefficientSet& second() const noexcept { return second_; }
  /// Recovery/limiting chain, outermost first.
  const std::vector<WeightOperator>& chain() const noexcept { return chain_; }

  std::vector<double> grid() const { return periodic_grid(problem_.x_lo, problem_.x_lo + dx_ * n_, n_); }

  Field initial() const {
    Field u(n_);
    auto x = grid();
    for (std::size_t i = 0; i < n_; ++i) u[i] = problem_.initial(x[i]);
    return u;
  }

  Field means(std::span<const double> u) const {
    require_size("means", n_, u.size());
    Field out(u.begin(), u.end());
    apply_chain(chain_, out);
    return out;
  }

  Field mean_rhs(std::span<const double> u, double /*t*/) const {
    require_size("mean_rhs", n_, u.size());
    Field rhs(n_, 0.0);
    if (mode_ != Mode::diffusion) {
      if (opts_.tvb_p) {
        Field F = tvb_fluxes(u, means(u), problem_.flux, *opts_.tvb_p, dx_);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] = -(F[i] - F[(i + n_ - 1) % n_]) / dx_;
      } else {
        Field f(n_), d(n_);
        for (std::size_t i = 0; i < n_; ++i) f[i] = problem_.flux(u[i]);
        conv_stencil_.apply_to(f, d);
        apply_chain(diff_chain_, d);
        for (std::size_t i = 0; i < n_; ++i) rhs[i] -= d[i] / dx_;
      }
    }
    if (mode_ != Mode::convection) {
      Field a(n_), d(n_);
      for (std::size_t i = 0; i < n_; ++i) a[i] = problem_.diffusion(u[i]);
      diff_stencil_.apply_to(a, d);
      apply_chain(conv_chain_, d);
      const double s = 1.0 / (dx_ * dx_);
      for (std::size_t i = 0; i < n_; ++i) rhs[i] += d[i] * s;
    }
    return rhs;
  }

  Recovered recover(std::span<const double> means, double /*t*/, bool limit) const {
    require_size("recover", n_, means.size());
    Recovered r{Field(means.begin(), means.end()), {}};
    for (const auto& w : chain_) {
      w.solve_into(r.u, r.u);
      if (limit) r.report.merge(limit_bounds_line(r.u, problem_.bounds, w.c()));
    }
    return r;
  }

  /// Forward-Euler admissible dt (C = 1) of the compact scheme.
  double forward_euler_dt(DtScale scale = DtScale::cfl) const {
    GridContext g{dx_, opts_.order, opts_.alpha1, opts_.alpha2, scale};
    return max_stable_dt(problem_, g, mode_, 1.0);
  }

  /// Step bound of the TVB bound-preservation theorem, lambda * max|f'| <= 1/12.
  double tvb_dt() const {
    const double s = problem_.flux.max_slope;
    return s > 0.0 ? dx_ / (12.0 * s) : std::numeric_limits<double>::infinity();
  }

 private:
  static void apply_chain(const std::vector<WeightOperator>& chain, Field& v) {
    Field tmp(v.size());
    for (std::size_t k = chain.size(); k-- > 0;) {
      chain[k].apply_to(v, tmp);
      v.swap(tmp);
    }
  }

  ProblemSpec1D problem_;
  std::size_t n_;
  double dx_;
  SchemeOptions opts_;
  Mode mode_;
  CoefficientSet first_, second_;
  std::vector<WeightOperator> conv_chain_, diff_chain_, chain_;
  DiffStencil conv_stencil_, diff_stencil_;
};

// ---------------------------------------------------------------------------
// Single forward-Euler steps

struct StepContext {
  double dx = 0.0;
  double dt = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  int order = 4;
  CoefficientSet first;
  CoefficientSet second;
  std::optional<double> alpha1{};
  std::optional<double> alpha2{};
};

inline StepContext make_step_context(double dx, double dt, int order = 4, std::optional<double> alpha1 = {},
                                     std::optional<double> alpha2 = {}) {
  if (!(dx > 0.0) || !(dt > 0.0)) throw std::invalid_argument("step context needs positive dx and dt");
  return {dx, dt, dt / dx, dt / (dx * dx), order, first_derivative_coefficients(order, alpha1),
          second_derivative_coefficients(order, alpha2), alpha1, alpha2};
}

struct StepResult {
  Field u;
  Field means;
  LimiterReport report;
};

namespace detail {

inline StepResult euler_step(std::span<const double> u, const StepContext& ctx, const ProblemSpec1D& problem, Mode mode,
                             bool limit) {
  SchemeOptions o;
  o.order = ctx.order;
  o.alpha1 = ctx.alpha1;
  o.alpha2 = ctx.alpha2;
  o.mode = mode;
  o.dx = ctx.dx;
  PeriodicScheme1D s(problem, u.size(), o);
  const double admissible = s.forward_euler_dt();
  if (ctx.dt > admissible * (1.0 + 1e-12)) throw CflViolation("forward-Euler step exceeds the weak-monotonicity CFL", admissible);
  Field ubar = s.means(u);
  Field rhs = s.mean_rhs(u, 0.0);
  for (std::size_t i = 0; i < ubar.size(); ++i) ubar[i] += ctx.dt * rhs[i];
  Recovered r = s.recover(ubar, 0.0, limit);
  return {std::move(r.u), std::move(ubar), r.report};
}

}  // namespace detail

inline StepResult euler_step_convection(std::span<const double> u, const StepContext& ctx,
                                        const ProblemSpec1D& problem, bool limit = true) {
  return detail::euler_step(u, ctx, problem, Mode::convection, limit);
}

inline StepResult euler_step_convdiff(std::span<const double> u, const StepContext& ctx, const ProblemSpec1D& problem,
                                      bool limit = true) {
  return detail::euler_step(u, ctx, problem, Mode::convdiff, limit);
}

inline StepResult euler_step_diffusion(std::span<const double> u, const StepContext& ctx,
                                       const ProblemSpec1D& problem, bool limit = true) {
  return detail::euler_step(u, ctx, problem, Mode::diffusion, limit);
}

}  // namespace cbp
