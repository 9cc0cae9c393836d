#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/field.hpp"
#include "cbp/rational.hpp"

namespace cbp {

/// Compact scheme alpha W f^(k) = (1/dx^k) D f in the paper's unnormalized (alpha, beta, a, b) form.
struct CoefficientSet {
  int derivative_order = 1;
  int accuracy_order = 4;
  double alpha = 0.0;
  double beta = 0.0;
  double a = 0.0;
  double b = 0.0;
  double cfl_factor = 0.0;

  double normalization() const noexcept { return 1.0 + 2.0 * alpha + 2.0 * beta; }
  double normalized_a() const noexcept { return a / normalization(); }
  double normalized_b() const noexcept { return b / normalization(); }
};

struct ExactCoefficients {
  Rational alpha, beta, a, b, cfl_factor;
};

namespace detail {

template <class T>
T first_beta(T al) { return (T(3) * al - T(1)) / T(12); }
template <class T>
T first_a(T al) { return T(2) / T(9) * (T(8) - T(3) * al); }
template <class T>
T first_b(T al) { return (T(57) * al - T(17)) / T(18); }
template <class T>
T first_cfl(T al) { return T(6) * (T(3) * al - T(1)) / (T(57) * al - T(17)); }

template <class T>
T second_beta(T al) { return (T(11) * al - T(2)) / T(124); }
template <class T>
T second_a(T al) { return (T(48) - T(78) * al) / T(31); }
template <class T>
T second_b(T al) { return (T(291) * al - T(36)) / T(62); }
template <class T>
T second_cfl(T al) { return T(124) / (T(3) * (T(116) - T(111) * al)); }

inline CoefficientSet materialize(int deriv, int order, const ExactCoefficients& e) {
  return {deriv, order, e.alpha.value(), e.beta.value(), e.a.value(), e.b.value(), e.cfl_factor.value()};
}

inline void check_order(int order) {
  if (order != 4 && order != 6 && order != 8)
    throw std::domain_error("accuracy order must be 4, 6 or 8, got " + std::to_string(order));
}

inline constexpr double first_alpha_lo = 1.0 / 3.0;
inline constexpr double first_alpha_hi = 5.0 / 9.0;
inline constexpr double second_alpha_lo = 2.0 / 11.0;
inline constexpr double second_alpha_hi = 60.0 / 113.0;

inline void check_first_alpha(double al) {
  if (!(al > first_alpha_lo && al <= first_alpha_hi))
    throw std::domain_error("alpha1 = " + std::to_string(al) + " outside admissible interval (1/3, 5/9]");
}

inline void check_second_alpha(double al) {
  if (!(al > second_alpha_lo && al <= second_alpha_hi))
    throw std::domain_error("alpha2 = " + std::to_string(al) + " outside admissible interval (2/11, 60/113]");
}

}  // namespace detail

inline ExactCoefficients first_derivative_exact(Rational al) {
  using namespace detail;
  return {al, first_beta(al), first_a(al), first_b(al), first_cfl(al)};
}

inline ExactCoefficients second_derivative_exact(Rational al) {
  using namespace detail;
  return {al, second_beta(al), second_a(al), second_b(al), second_cfl(al)};
}

inline CoefficientSet first_derivative_coefficients(int accuracy_order, std::optional<double> alpha1 = std::nullopt) {
  detail::check_order(accuracy_order);
  if (accuracy_order == 4)
    return detail::materialize(1, 4, {Rational(1, 4), Rational(0), Rational(3, 2), Rational(0), Rational(1, 3)});
  if (accuracy_order == 8) return detail::materialize(1, 8, first_derivative_exact(Rational(4, 9)));

  double al = alpha1.value_or(0.5);
  detail::check_first_alpha(al);
  if (auto r = exact_rational(al)) return detail::materialize(1, 6, first_derivative_exact(*r));
  using namespace detail;
  return {1, 6, al, first_beta(al), first_a(al), first_b(al), first_cfl(al)};
}

inline CoefficientSet second_derivative_coefficients(int accuracy_order, std::optional<double> alpha2 = std::nullopt) {
  detail::check_order(accuracy_order);
  if (accuracy_order == 4)
    return detail::materialize(2, 4, {Rational(1, 10), Rational(0), Rational(6, 5), Rational(0), Rational(5, 12)});
  if (accuracy_order == 8) return detail::materialize(2, 8, second_derivative_exact(Rational(344, 1179)));

  double al = alpha2.value_or(1.0 / 3.0);
  detail::check_second_alpha(al);
  if (auto r = exact_rational(al)) return detail::materialize(2, 6, second_derivative_exact(*r));
  using namespace detail;
  return {2, 6, al, second_beta(al), second_a(al), second_b(al), second_cfl(al)};
}

// ---------------------------------------------------------------------------
// Tridiagonal weightings (1, c, 1)/(c+2)

enum class Topology {
  periodic,               // N x N circulant
  dirichlet_rectangular,  // N x (N+2), input carries the two boundary values
  truncated,              // N x N, edge rows (c, 1)/(c+1) with the absent neighbour dropped
};

class WeightOperator {
 public:
  WeightOperator(std::size_t n, double c, Topology topology = Topology::periodic)
      : n_(n), c_(c), topology_(topology) {
    if (!(c >= 2.0)) throw std::domain_error("weighting requires c >= 2, got " + std::to_string(c));
    std::size_t min_n = topology == Topology::periodic ? 3 : (topology == Topology::truncated ? 2 : 1);
    if (n < min_n) throw std::invalid_argument("weighting size too small: " + std::to_string(n));
    // (1, 2, 1)/4 annihilates the alternating mode on an even periodic grid
    if (topology == Topology::periodic && n % 2 == 0 && c - 2.0 < 1e-12)
      throw std::domain_error("periodic weighting with c = 2 is singular for even n = " + std::to_string(n));
    factorize();
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t input_size() const noexcept { return topology_ == Topology::dirichlet_rectangular ? n_ + 2 : n_; }
  double c() const noexcept { return c_; }
  Topology topology() const noexcept { return topology_; }

  /// out = W in. `in` has input_size() entries; must not alias `out`.
  template <Line In, MutableLine Out>
  void apply_to(const In& in, Out&& out) const {
    const std::size_t n = n_;
    const double c = c_;
    switch (topology_) {
      case Topology::periodic:
        out[0] = (in[n - 1] + c * in[0] + in[1]) / (c + 2.0);
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (in[i - 1] + c * in[i] + in[i + 1]) / (c + 2.0);
        out[n - 1] = (in[n - 2] + c * in[n - 1] + in[0]) / (c + 2.0);
        break;
      case Topology::dirichlet_rectangular:
        for (std::size_t i = 0; i < n; ++i) out[i] = (in[i] + c * in[i + 1] + in[i + 2]) / (c + 2.0);
        break;
      case Topology::truncated:
        out[0] = (c * in[0] + in[1]) / (c + 1.0);
        for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (in[i - 1] + c * in[i] + in[i + 1]) / (c + 2.0);
        out[n - 1] = (in[n - 2] + c * in[n - 1]) / (c + 1.0);
        break;
    }
  }

  /// Solves W x = rhs. For the rectangular topology `left`/`right` are the boundary values.
  /// `rhs` and `out` may alias.
  template <Line Rhs, MutableLine Out>
  void solve_into(const Rhs& rhs, Out&& out, double left = 0.0, double right = 0.0) const {
    const std::size_t n = n_;
    auto r = [&](std::size_t i) {
      double v = rhs[i];
      if (topology_ == Topology::dirichlet_rectangular) {
        if (i == 0) v -= left / (c_ + 2.0);
        if (i == n - 1) v -= right / (c_ + 2.0);
      }
      return v;
    };
    out[0] = r(0) * inv_den_[0];
    for (std::size_t i = 1; i < n; ++i) out[i] = (r(i) - lower_[i] * out[i - 1]) * inv_den_[i];
    for (std::size_t i = n - 1; i-- > 0;) out[i] = out[i] - cprime_[i] * out[i + 1];
    if (topology_ == Topology::periodic) {
      double f = (out[0] + sm_beta_ * out[n - 1] / sm_gamma_) * sm_scale_;
      for (std::size_t i = 0; i < n; ++i) out[i] = out[i] - f * sm_z_[i];
    }
  }

 private:
  void factorize() {
    const std::size_t n = n_;
    const double e = 1.0 / (c_ + 2.0);
    const double d = c_ / (c_ + 2.0);
    std::vector<double> diag(n, d), upper(n, e);
    lower_.assign(n, e);
    lower_[0] = 0.0;
    upper[n - 1] = 0.0;
    if (topology_ == Topology::truncated) {
      diag[0] = diag[n - 1] = c_ / (c_ + 1.0);
      upper[0] = 1.0 / (c_ + 1.0);
      lower_[n - 1] = 1.0 / (c_ + 1.0);
    }
    if (topology_ == Topology::periodic) {
      // Sherman-Morrison: A = T + u v^T with u = (gamma, 0.., alpha), v = (1, 0.., beta/gamma)
      sm_gamma_ = -diag[0];
      sm_beta_ = e;  // A[0][n-1]
      const double alpha = e;  // A[n-1][0]
      diag[0] -= sm_gamma_;
      diag[n - 1] -= alpha * sm_beta_ / sm_gamma_;
      thomas(diag, upper);
      sm_z_.assign(n, 0.0);
      sm_z_[0] = sm_gamma_;
      sm_z_[n - 1] = alpha;
      sm_z_[0] = sm_z_[0] * inv_den_[0];
      for (std::size_t i = 1; i < n; ++i) sm_z_[i] = (sm_z_[i] - lower_[i] * sm_z_[i - 1]) * inv_den_[i];
      for (std::size_t i = n - 1; i-- > 0;) sm_z_[i] -= cprime_[i] * sm_z_[i + 1];
      sm_scale_ = 1.0 / (1.0 + sm_z_[0] + sm_beta_ * sm_z_[n - 1] / sm_gamma_);
    } else {
      thomas(diag, upper);
    }
  }

  void thomas(const std::vector<double>& diag, const std::vector<double>& upper) {
    const std::size_t n = n_;
    cprime_.assign(n, 0.0);
    inv_den_.assign(n, 0.0);
    inv_den_[0] = 1.0 / diag[0];
    cprime_[0] = upper[0] * inv_den_[0];
    for (std::size_t i = 1; i < n; ++i) {
      inv_den_[i] = 1.0 / (diag[i] - lower_[i] * cprime_[i - 1]);
      cprime_[i] = upper[i] * inv_den_[i];
    }
  }

  std::size_t n_;
  double c_;
  Topology topology_;
  std::vector<double> lower_, cprime_, inv_den_, sm_z_;
  double sm_gamma_ = 0.0, sm_beta_ = 0.0, sm_scale_ = 0.0;
};

inline Field apply_weighting(const WeightOperator& w, std::span<const double> u) {
  require_size("apply_weighting", w.input_size(), u.size());
  Field out(w.size());
  w.apply_to(u, out);
  return out;
}

inline Field solve_weighting(const WeightOperator& w, std::span<const double> rhs, double left = 0.0,
                             double right = 0.0) {
  require_size("solve_weighting", w.size(), rhs.size());
  Field out(rhs.begin(), rhs.end());
  w.solve_into(out, out, left, right);
  return out;
}

// ---------------------------------------------------------------------------
// Pentadiagonal factorizations

/// c-values of W~ = W(c_first) W(c_second), c_first <= c_second.
struct WeightFactors {
  double c_first = 4.0;
  double c_second = 4.0;
};

struct WeightFactorization {
  WeightOperator first;
  WeightOperator second;
};

namespace detail {

inline double snap_to_two(double c) { return std::abs(c - 2.0) < 1e-12 ? 2.0 : c; }

inline WeightFactors checked_factors(double lo, double hi) {
  lo = snap_to_two(lo);
  if (lo < 2.0) throw std::domain_error("factorization gives c = " + std::to_string(lo) + " < 2");
  return {lo, hi};
}

}  // namespace detail

inline WeightFactors factor_first_weighting(const CoefficientSet& k) {
  if (k.derivative_order != 1) throw std::invalid_argument("factor_first_weighting needs a first-derivative set");
  const double al = k.alpha;
  detail::check_first_alpha(al);
  double centre = 6.0 * al / (3.0 * al - 1.0);
  double spread = std::sqrt(2.0) * std::sqrt(7.0 - 24.0 * al + 27.0 * al * al) / std::abs(3.0 * al - 1.0);
  return detail::checked_factors(centre - spread, centre + spread);
}

inline WeightFactors factor_second_weighting(const CoefficientSet& k) {
  if (k.derivative_order != 2) throw std::invalid_argument("factor_second_weighting needs a second-derivative set");
  const double al = k.alpha;
  detail::check_second_alpha(al);
  double centre = 62.0 * al / (11.0 * al - 2.0);
  double spread = std::sqrt(2.0) * std::sqrt(128.0 - 726.0 * al + 2043.0 * al * al) / std::abs(11.0 * al - 2.0);
  return detail::checked_factors(centre - spread, centre + spread);
}

inline WeightFactorization make_factorization(const WeightFactors& f, std::size_t n,
                                              Topology topology = Topology::periodic) {
  return {WeightOperator(n, f.c_first, topology), WeightOperator(n, f.c_second, topology)};
}

/// Weighting chain of a coefficient set, outermost factor first: the means are
/// chain[0] chain[1] ... u and recovery solves chain[0] first.
inline std::vector<WeightOperator> weight_chain(const CoefficientSet& k, std::size_t n) {
  if (k.accuracy_order == 4) return {WeightOperator(n, 1.0 / k.alpha)};
  WeightFactors f = k.derivative_order == 1 ? factor_first_weighting(k) : factor_second_weighting(k);
  return {WeightOperator(n, f.c_first), WeightOperator(n, f.c_second)};
}

/// Normalized pentadiagonal row (beta, alpha, 1, alpha, beta)/(1+2alpha+2beta), offsets -2..2.
inline std::array<double, 5> weighting_row(const CoefficientSet& k) {
  double s = k.normalization();
  return {k.beta / s, k.alpha / s, 1.0 / s, k.alpha / s, k.beta / s};
}

// ---------------------------------------------------------------------------
// Right-hand-side difference stencils

struct DiffStencil {
  int derivative_order = 1;
  int half_width = 1;
  std::array<double, 5> weights{};  // offsets -2..2

  /// Periodic application; must not alias.
  template <Line In, MutableLine Out>
  void apply_to(const In& in, Out&& out) const {
    const std::size_t n = in.size();
    const double w0 = weights[0], w1 = weights[1], w2 = weights[2], w3 = weights[3], w4 = weights[4];
    auto at = [&](std::size_t i, int off) { return in[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i + n) + off) % n]; };
    if (half_width == 1) {
      for (std::size_t i = 0; i < n; ++i) out[i] = w1 * at(i, -1) + w2 * in[i] + w3 * at(i, 1);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        out[i] = w0 * at(i, -2) + w1 * at(i, -1) + w2 * in[i] + w3 * at(i, 1) + w4 * at(i, 2);
    }
  }
};

inline DiffStencil difference_stencil(const CoefficientSet& k) {
  const double s = 4.0 * k.normalization();
  const double a = k.a, b = k.b;
  DiffStencil d;
  d.derivative_order = k.derivative_order;
  d.half_width = b == 0.0 ? 1 : 2;
  if (k.derivative_order == 1)
    d.weights = {-b / s, -2.0 * a / s, 0.0, 2.0 * a / s, b / s};
  else
    d.weights = {b / s, 4.0 * a / s, -(8.0 * a + 2.0 * b) / s, 4.0 * a / s, b / s};
  return d;
}

inline Field apply_stencil(const DiffStencil& d, std::span<const double> f) {
  Field out(f.size());
  d.apply_to(f, out);
  return out;
}

/// Derivative approximation (1/dx^k) W~^{-1} D f on a periodic grid.
inline Field compact_derivative(const CoefficientSet& k, std::span<const double> f, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("compact_derivative: dx must be positive");
  Field out = apply_stencil(difference_stencil(k), f);
  for (const auto& w : weight_chain(k, f.size())) w.solve_into(out, out);
  const double scale = k.derivative_order == 1 ? 1.0 / dx : 1.0 / (dx * dx);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace cbp
