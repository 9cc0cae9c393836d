#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cbp/limiters.hpp"

namespace cbp {

/// A scalar function of u with the bound of |derivative| over the invariant region.
struct ScalarLaw {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double max_slope = 0.0;

  bool active() const noexcept { return static_cast<bool>(value); }
  double operator()(double u) const { return value(u); }
};

enum class BoundaryKind { periodic, inflow_outflow, dirichlet };

struct ProblemSpec1D {
  std::string id;
  ScalarLaw flux;
  ScalarLaw diffusion;
  std::function<double(double)> initial;
  std::function<double(double, double)> exact;  // (x, t), empty when unknown
  double x_lo = 0.0;
  double x_hi = 1.0;
  BoundaryKind boundary = BoundaryKind::periodic;
  Bounds bounds = Bounds::of(0.0, 1.0);
  std::function<double(double)> left;   // boundary data L(t)
  std::function<double(double)> right;  // boundary data R(t), Dirichlet only
  double start_time = 0.0;
  double final_time = 1.0;

  double length() const noexcept { return x_hi - x_lo; }
};

struct ProblemSpec2D {
  std::string id;
  ScalarLaw flux_x;       // f
  ScalarLaw flux_y;       // g
  ScalarLaw diffusion_x;  // a
  ScalarLaw diffusion_y;  // b
  std::function<double(double, double)> initial;
  std::function<double(double, double, double)> exact;  // (x, y, t)
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  Bounds bounds = Bounds::of(0.0, 1.0);
  double start_time = 0.0;
  double final_time = 1.0;
};

/// Periodic grid x_i = x_lo + i dx, i = 1..N.
inline std::vector<double> periodic_grid(double x_lo, double x_hi, std::size_t n) {
  std::vector<double> x(n);
  const double dx = (x_hi - x_lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = x_lo + static_cast<double>(i + 1) * dx;
  return x;
}

/// Bounded grid with N interior points and the two endpoints, x_i = x_lo + i dx, i = 0..N+1.
inline std::vector<double> bounded_grid(double x_lo, double x_hi, std::size_t n) {
  std::vector<double> x(n + 2);
  const double dx = (x_hi - x_lo) / static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n + 2; ++i) x[i] = x_lo + static_cast<double>(i) * dx;
  x[n + 1] = x_hi;
  return x;
}

}  // namespace cbp
