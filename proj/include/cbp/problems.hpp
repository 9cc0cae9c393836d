#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cbp/limiters.hpp"
#include "cbp/problem.hpp"

namespace cbp {

/// Barenblatt solution of u_t = (u^m)_xx.
inline double barenblatt(double x, double t, int m) {
  if (!(t > 0.0)) throw std::domain_error("barenblatt needs t > 0");
  if (m <= 1) throw std::domain_error("barenblatt needs m > 1");
  const double k = 1.0 / (m + 1.0);
  const double s = 1.0 - k * (m - 1.0) / (2.0 * m) * x * x / std::pow(t, 2.0 * k);
  if (s <= 0.0) return 0.0;
  return std::pow(t, -k) * std::pow(s, 1.0 / (m - 1.0));
}

/// Solves u = u0(s - speed * u * t) for the smooth solution of a Burgers-type problem whose
/// characteristics move with speed*u along s. Valid before the first shock.
inline double burgers_characteristic(const std::function<double(double)>& u0,
                                     const std::function<double(double)>& du0, double s, double t, double lo,
                                     double hi, double speed = 1.0) {
  auto g = [&](double u) { return u - u0(s - speed * u * t); };
  double a = lo, b = hi;
  double u = u0(s);
  for (int it = 0; it < 100; ++it) {
    const double gu = g(u);
    if (std::abs(gu) < 1e-15) return u;
    if (gu < 0.0) a = std::max(a, u); else b = std::min(b, u);
    const double dg = 1.0 + speed * t * du0(s - speed * u * t);
    double next = dg != 0.0 ? u - gu / dg : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - u) < 1e-16 * std::max(1.0, std::abs(u))) return next;
    u = next;
  }
  return u;
}

inline ScalarLaw linear_law(double c) {
  return {[c](double u) { return c * u; }, [c](double) { return c; }, std::abs(c)};
}

inline ScalarLaw burgers_law(double max_abs_u) {
  return {[](double u) { return 0.5 * u * u; }, [](double u) { return u; }, max_abs_u};
}

/// a(u) = max(u, 0)^m with max a' = m M^(m-1) over [0, M].
inline ScalarLaw porous_law(int m, double M = 1.0) {
  return {[m](double u) { return std::pow(std::max(u, 0.0), m); },
          [m](double u) { return m * std::pow(std::max(u, 0.0), m - 1); }, m * std::pow(M, m - 1)};
}

struct ProblemParams {
  int pme_m = 5;
};

struct NamedProblem {
  std::string id;
  std::variant<ProblemSpec1D, ProblemSpec2D> spec;
  double expected_order = 0.0;  // 0 when the problem is not an accuracy test

  bool is_2d() const noexcept { return std::holds_alternative<ProblemSpec2D>(spec); }
  const ProblemSpec1D& one_d() const { return std::get<ProblemSpec1D>(spec); }
  const ProblemSpec2D& two_d() const { return std::get<ProblemSpec2D>(spec); }
  const Bounds& bounds() const { return is_2d() ? two_d().bounds : one_d().bounds; }
  bool has_exact() const { return is_2d() ? static_cast<bool>(two_d().exact) : static_cast<bool>(one_d().exact); }
};

inline std::vector<std::string> builtin_ids() {
  return {"linadv-sin4", "linadv-step",   "burgers-sin", "convdiff-lin", "pme-1d",    "inflow-burgers",
          "dirichlet-convdiff", "2d-linadv", "2d-linadv-square", "2d-burgers", "2d-convdiff", "2d-pme"};
}

inline NamedProblem builtin(const std::string& id, ProblemParams params = {}) {
  constexpr double pi = std::numbers::pi;
  const double two_pi = 2.0 * pi;

  if (id == "linadv-sin4") {
    ProblemSpec1D p;
    auto u0 = [](double x) { return 0.5 + std::pow(std::sin(x), 4); };
    p.flux = linear_law(1.0);
    p.initial = u0;
    p.exact = [u0](double x, double t) { return u0(x - t); };
    p.x_hi = two_pi;
    p.bounds = Bounds::of(0.5, 1.5);
    p.final_time = 10.0;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "linadv-step") {
    ProblemSpec1D p;
    auto u0 = [pi, two_pi](double x) {
      x = std::fmod(x, two_pi);
      if (x <= 0.0) x += two_pi;
      return x <= pi ? 1.0 : 0.0;
    };
    p.flux = linear_law(1.0);
    p.initial = u0;
    p.exact = [u0](double x, double t) { return u0(x - t); };
    p.x_hi = two_pi;
    p.bounds = Bounds::of(0.0, 1.0);
    p.final_time = 10.0;
    p.id = id;
    return {id, p};
  }
  if (id == "burgers-sin") {
    ProblemSpec1D p;
    auto u0 = [](double x) { return std::sin(x) + 0.5; };
    auto du0 = [](double x) { return std::cos(x); };
    p.flux = burgers_law(1.5);
    p.initial = u0;
    p.exact = [u0, du0](double x, double t) { return burgers_characteristic(u0, du0, x, t, -0.5, 1.5); };
    p.x_lo = -pi;
    p.x_hi = pi;
    p.bounds = Bounds::of(-0.5, 1.5);
    p.final_time = 0.5;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "convdiff-lin") {
    constexpr double c = 1.0, d = 0.001;
    ProblemSpec1D p;
    p.flux = linear_law(c);
    p.diffusion = linear_law(d);
    p.initial = [](double x) { return std::sin(x); };
    p.exact = [](double x, double t) { return std::exp(-d * t) * std::sin(x - c * t); };
    p.x_hi = two_pi;
    p.bounds = Bounds::of(-1.0, 1.0);
    p.final_time = 1.0;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "pme-1d") {
    const int m = params.pme_m;
    if (m <= 1) throw std::invalid_argument("porous-medium exponent must exceed 1");
    ProblemSpec1D p;
    p.diffusion = porous_law(m);
    p.initial = [m](double x) { return barenblatt(x, 1.0, m); };
    p.exact = [m](double x, double t) { return barenblatt(x, t, m); };
    p.x_lo = -6.0;
    p.x_hi = 6.0;
    p.bounds = Bounds::of(0.0, 1.0);
    p.start_time = 1.0;
    p.final_time = 2.0;
    p.id = id;
    return {id, p};
  }
  if (id == "inflow-burgers") {
    ProblemSpec1D p;
    auto u0 = [](double x) { return 0.5 * std::sin(x) + 0.5; };
    auto du0 = [](double x) { return 0.5 * std::cos(x); };
    auto exact = [u0, du0](double x, double t) { return burgers_characteristic(u0, du0, x, t, 0.0, 1.0); };
    p.flux = burgers_law(1.0);
    p.initial = u0;
    p.exact = exact;
    p.x_hi = two_pi;
    p.boundary = BoundaryKind::inflow_outflow;
    p.bounds = Bounds::of(0.0, 1.0);
    p.left = [exact](double t) { return exact(0.0, t); };
    p.final_time = 0.5;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "dirichlet-convdiff") {
    constexpr double c = 1.0, d = 0.01;
    ProblemSpec1D p;
    auto exact = [](double x, double t) { return std::cos(x - c * t) * std::exp(-d * t); };
    p.flux = linear_law(c);
    p.diffusion = linear_law(d);
    p.initial = [exact](double x) { return exact(x, 0.0); };
    p.exact = exact;
    p.x_hi = two_pi;
    p.boundary = BoundaryKind::dirichlet;
    p.bounds = Bounds::of(-1.0, 1.0);
    p.left = [exact](double t) { return exact(0.0, t); };
    p.right = [exact, two_pi](double t) { return exact(two_pi, t); };
    p.final_time = 1.0;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "2d-linadv" || id == "2d-linadv-square") {
    ProblemSpec2D p;
    p.flux_x = linear_law(1.0);
    p.flux_y = linear_law(1.0);
    if (id == "2d-linadv") {
      auto u0 = [](double x, double y) { return 0.5 + 0.5 * std::pow(std::sin(x + y), 4); };
      p.initial = u0;
      p.exact = [u0](double x, double y, double t) { return u0(x - t, y - t); };
      p.x_hi = p.y_hi = two_pi;
      p.bounds = Bounds::of(0.5, 1.0);
      p.final_time = 1.0;
    } else {
      auto wrap = [pi, two_pi](double v) { return v - two_pi * std::floor((v + pi) / two_pi); };
      auto u0 = [wrap](double x, double y) {
        return std::abs(wrap(x)) <= 0.2 && std::abs(wrap(y)) <= 0.2 ? 1.0 : 0.0;
      };
      p.initial = u0;
      p.exact = [u0](double x, double y, double t) { return u0(x - t, y - t); };
      p.x_lo = p.y_lo = -pi;
      p.x_hi = p.y_hi = pi;
      p.bounds = Bounds::of(0.0, 1.0);
      p.final_time = 0.5;
    }
    p.id = id;
    return {id, p, id == "2d-linadv" ? 4.0 : 0.0};
  }
  if (id == "2d-burgers") {
    ProblemSpec2D p;
    auto u0 = [](double s) { return 0.5 + std::sin(s); };
    auto du0 = [](double s) { return std::cos(s); };
    p.flux_x = burgers_law(1.5);
    p.flux_y = burgers_law(1.5);
    p.initial = [u0](double x, double y) { return u0(x + y); };
    p.exact = [u0, du0](double x, double y, double t) {
      return burgers_characteristic(u0, du0, x + y, t, -0.5, 1.5, 2.0);
    };
    p.x_lo = p.y_lo = -pi;
    p.x_hi = p.y_hi = pi;
    p.bounds = Bounds::of(-0.5, 1.5);
    p.final_time = 0.2;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "2d-convdiff") {
    constexpr double c = 1.0, d = 0.001;
    ProblemSpec2D p;
    p.flux_x = p.flux_y = linear_law(c);
    p.diffusion_x = p.diffusion_y = linear_law(d);
    p.initial = [](double x, double y) { return std::sin(x + y); };
    p.exact = [](double x, double y, double t) { return std::exp(-2.0 * d * t) * std::sin(x + y - 2.0 * c * t); };
    p.x_hi = p.y_hi = two_pi;
    p.bounds = Bounds::of(-1.0, 1.0);
    p.final_time = 0.5;
    p.id = id;
    return {id, p, 4.0};
  }
  if (id == "2d-pme") {
    const int m = params.pme_m;
    if (m <= 1) throw std::invalid_argument("porous-medium exponent must exceed 1");
    ProblemSpec2D p;
    p.diffusion_x = p.diffusion_y = porous_law(m);
    p.initial = [](double x, double y) { return std::abs(x) <= 0.5 && std::abs(y) <= 0.5 ? 1.0 : 0.0; };
    p.x_lo = p.y_lo = -2.0;
    p.x_hi = p.y_hi = 2.0;
    p.bounds = Bounds::of(0.0, 1.0);
    p.final_time = 0.01;
    p.id = id;
    return {id, p};
  }
  throw std::invalid_argument("unknown problem id '" + id + "'");
}

}  // namespace cbp
