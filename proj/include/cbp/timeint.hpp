#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/field.hpp"
#include "cbp/limiters.hpp"

namespace cbp {

/// A conservative semi-discretization written for weighted means: d(means(u))/dt = mean_rhs(u, t),
/// and recover() maps means back to point values (optionally limited).
template <class S>
concept Semidiscretization = requires(const S& s, std::span<const double> v, double t, bool limit) {
  { s.means(v) } -> std::convertible_to<Field>;
  { s.mean_rhs(v, t) } -> std::convertible_to<Field>;
  { s.recover(v, t, limit) } -> std::convertible_to<Recovered>;
};

enum class Method { forward_euler, ssp_ms4, ssp_rk4 };

/// Explicit RK in Shu-Osher form: u_i = sum_k alpha[i-1][k] u_k + dt beta[i-1][k] F(u_k), k < i,
/// with u_0 = u^n and the last stage the step result.
struct ShuOsherTableau {
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> beta;

  std::size_t stages() const noexcept { return alpha.size(); }

  double ssp_coefficient() const {
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (std::size_t k = 0; k < alpha[i].size(); ++k)
        if (beta[i][k] > 0.0) c = std::min(c, alpha[i][k] / beta[i][k]);
    return c;
  }

  /// Stage times c_i (c_0 = 0).
  std::vector<double> abscissae() const {
    std::vector<double> c(alpha.size() + 1, 0.0);
    for (std::size_t i = 0; i < alpha.size(); ++i)
      for (std::size_t k = 0; k <= i; ++k) c[i + 1] += alpha[i][k] * c[k] + beta[i][k];
    return c;
  }
};

inline ShuOsherTableau forward_euler_tableau() { return {{{1.0}}, {{1.0}}}; }

/// Five-stage fourth-order SSP Runge-Kutta (Spiteri-Ruuth), C ~ 1.508.
inline ShuOsherTableau ssp_rk54_tableau() {
  return {{{1.0},
           {0.444370493651235, 0.555629506348765},
           {0.620101851488403, 0.0, 0.379898148511597},
           {0.178079954393132, 0.0, 0.0, 0.821920045606868},
           {0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269}},
          {{0.391752226571890},
           {0.0, 0.368410593050371},
           {0.0, 0.0, 0.251891774271694},
           {0.0, 0.0, 0.0, 0.544974750228521},
           {0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906}}};
}

/// Explicit linear multistep u^{n+1} = sum_j alpha_j u^{n+1-j} + dt beta_j F(u^{n+1-j}), j = 1..k.
struct MultistepMethod {
  std::vector<double> alpha;
  std::vector<double> beta;

  std::size_t steps() const noexcept { return alpha.size(); }

  double ssp_coefficient() const {
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < alpha.size(); ++j)
      if (beta[j] > 0.0) c = std::min(c, alpha[j] / beta[j]);
    return c;
  }
};

/// Optimal six-step fourth-order SSP multistep method, C = 0.16475925...
inline MultistepMethod ssp_ms4_method() {
  return {{0.3424608557170120759841030130447728086614, 0.0, 0.0, 0.1917982594347360725915706141337794117023,
           0.0935621249390094425344499606768847237481, 0.3721787599092424088898764121445630558882},
          {2.078553105578055306087676550434371805531, 0.0, 0.0, 1.16411222227969292703574618076515907479,
           0.5678717497487097992384710146321615292197, 0.0}};
}

struct IntegratorSpec {
  Method method = Method::ssp_ms4;
  double ssp_coefficient = 1.0;
  bool limit_every_stage = true;
  Method startup_method = Method::ssp_rk4;

  static IntegratorSpec make(Method m) {
    switch (m) {
      case Method::forward_euler:
        return {m, 1.0, true, Method::forward_euler};
      case Method::ssp_rk4:
        return {m, ssp_rk54_tableau().ssp_coefficient(), true, Method::ssp_rk4};
      case Method::ssp_ms4:
        return {m, ssp_ms4_method().ssp_coefficient(), true, Method::ssp_rk4};
    }
    throw std::invalid_argument("unknown method");
  }
};

inline const char* method_name(Method m) {
  switch (m) {
    case Method::forward_euler:
      return "fe";
    case Method::ssp_ms4:
      return "ms4";
    case Method::ssp_rk4:
      return "rk4";
  }
  return "?";
}

/// Means and mean time-derivative of one accepted state.
struct HistoryEntry {
  Field means;
  Field rhs;
};

namespace detail {

inline void axpy(Field& y, double a, const Field& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace detail

/// One Runge-Kutta step. `means_u` may carry means(u) when already known.
template <Semidiscretization S>
Recovered rk_step(const S& s, const ShuOsherTableau& tab, std::span<const double> u, double t, double dt, bool limit,
                  bool limit_every_stage = true, const Field* means_u = nullptr) {
  const std::size_t ns = tab.stages();
  const auto c = tab.abscissae();
  std::vector<Field> states(ns + 1), means(ns + 1), rhs(ns + 1);
  states[0] = Field(u.begin(), u.end());
  means[0] = means_u ? *means_u : s.means(u);
  LimiterReport report;
  for (std::size_t i = 1; i <= ns; ++i) {
    const auto& a = tab.alpha[i - 1];
    const auto& b = tab.beta[i - 1];
    Field m(means[0].size(), 0.0);
    for (std::size_t k = 0; k < i; ++k) {
      if (a[k] != 0.0) detail::axpy(m, a[k], means[k]);
      if (b[k] != 0.0) {
        if (rhs[k].empty()) rhs[k] = s.mean_rhs(states[k], t + c[k] * dt);
        detail::axpy(m, dt * b[k], rhs[k]);
      }
    }
    const bool lim = limit && (limit_every_stage || i == ns);
    Recovered r = s.recover(m, t + c[i] * dt, lim);
    report.merge(r.report);
    states[i] = std::move(r.u);
    means[i] = r.report.modified_count > 0 ? s.means(states[i]) : std::move(m);
  }
  return {std::move(states[ns]), report};
}

/// One multistep step from a history ordered newest first.
template <Semidiscretization S>
Recovered multistep_step(const S& s, const MultistepMethod& lmm, const std::deque<HistoryEntry>& history, double t,
                         double dt, bool limit) {
  if (history.size() < lmm.steps())
    throw std::logic_error("multistep step needs " + std::to_string(lmm.steps()) + " history entries, have " +
                           std::to_string(history.size()));
  Field m(history.front().means.size(), 0.0);
  for (std::size_t j = 0; j < lmm.steps(); ++j) {
    if (lmm.alpha[j] != 0.0) detail::axpy(m, lmm.alpha[j], history[j].means);
    if (lmm.beta[j] != 0.0) detail::axpy(m, dt * lmm.beta[j], history[j].rhs);
  }
  return s.recover(m, t + dt, limit);
}

/// Stateful SSP integrator; for MS4 it owns the history window and primes it with RK steps.
template <Semidiscretization S>
class SspIntegrator {
 public:
  SspIntegrator(const S& s, IntegratorSpec spec, bool limit,
                double forward_euler_dt = std::numeric_limits<double>::infinity())
      : s_(s), spec_(spec), limit_(limit), fe_dt_(forward_euler_dt), rk_(ssp_rk54_tableau()),
        lmm_(ssp_ms4_method()) {}

  const IntegratorSpec& spec() const noexcept { return spec_; }

  /// Advances the state returned by the previous call (or the initial state) by dt.
  Recovered advance(std::span<const double> u, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (dt > spec_.ssp_coefficient * fe_dt_ * (1.0 + 1e-12))
      throw CflViolation(std::string("dt exceeds C * forward-Euler bound for ") + method_name(spec_.method),
                         spec_.ssp_coefficient * fe_dt_);
    switch (spec_.method) {
      case Method::forward_euler:
        return rk_step(s_, fe_, u, t, dt, limit_);
      case Method::ssp_rk4:
        return rk_step(s_, rk_, u, t, dt, limit_, spec_.limit_every_stage);
      case Method::ssp_ms4:
        break;
    }
    if (!history_.empty() && std::abs(dt - dt_) > 1e-12 * dt)
      throw std::logic_error("multistep history was built with a different dt");
    dt_ = dt;
    history_.push_front({s_.means(u), s_.mean_rhs(u, t)});
    if (history_.size() > lmm_.steps()) history_.pop_back();
    if (history_.size() < lmm_.steps()) {
      const auto& tab = spec_.startup_method == Method::forward_euler ? fe_ : rk_;
      return rk_step(s_, tab, u, t, dt, limit_, spec_.limit_every_stage, &history_.front().means);
    }
    return multistep_step(s_, lmm_, history_, t, dt, limit_);
  }

  void reset() { history_.clear(); }

 private:
  const S& s_;
  IntegratorSpec spec_;
  bool limit_;
  double fe_dt_;
  ShuOsherTableau fe_ = forward_euler_tableau();
  ShuOsherTableau rk_;
  MultistepMethod lmm_;
  std::deque<HistoryEntry> history_;
  double dt_ = 0.0;
};

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  std::size_t modified = 0;
};

struct IntegrationResult {
  Field u;
  std::vector<StepRecord> log;
  LimiterReport report;
  double dt = 0.0;
  std::size_t steps = 0;
};

/// Number of uniform steps covering `duration` with dt <= dt_max.
inline std::size_t uniform_step_count(double duration, double dt_max) {
  if (!(duration > 0.0)) throw std::invalid_argument("final time must exceed the start time");
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
  return static_cast<std::size_t>(std::max(1.0, std::ceil(duration / dt_max * (1.0 - 1e-12))));
}

/// Integrates from t0 to T with the largest uniform dt <= dt_max that divides T - t0.
template <Semidiscretization S>
IntegrationResult integrate_to(const S& s, Field u0, double t0, double T, double dt_max, const IntegratorSpec& spec,
                               bool limit, double forward_euler_dt = std::numeric_limits<double>::infinity(),
                               const std::function<void(const StepRecord&, const Field&)>& observer = {}) {
  const std::size_t nsteps = uniform_step_count(T - t0, dt_max);
  const double dt = (T - t0) / static_cast<double>(nsteps);
  SspIntegrator<S> integ(s, spec, limit, forward_euler_dt);
  IntegrationResult res;
  res.u = std::move(u0);
  res.dt = dt;
  res.steps = nsteps;
  res.log.reserve(nsteps);
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double t = t0 + static_cast<double>(n) * dt;
    Recovered r = integ.advance(res.u, t, dt);
    res.u = std::move(r.u);
    res.report.merge(r.report);
    StepRecord rec;
    rec.step = n + 1;
    rec.t = n + 1 == nsteps ? T : t0 + static_cast<double>(n + 1) * dt;
    rec.dt = dt;
    auto [lo, hi] = std::minmax_element(res.u.begin(), res.u.end());
    rec.min = *lo;
    rec.max = *hi;
    for (double v : res.u) rec.sum += v;
    rec.modified = r.report.modified_count;
    res.log.push_back(rec);
    if (observer) observer(rec, res.u);
  }
  return res;
}

}  // namespace cbp
