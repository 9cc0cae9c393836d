#pragma once

#include <random>

#include "cbp/limiters.hpp"
#include "cbp/operators.hpp"

namespace cbp::test {

struct Fixture {
  Field u;
  Bounds bounds;
  double c = 4.0;
  LineEdges edges;
};

/// Random weighted means in [m, M] (smooth, jumpy or alternating), pulled back through W(c) so
/// the point values satisfy the limiter precondition exactly.
inline Field random_means(std::mt19937& gen, std::size_t n, double m, double M) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Field means(n);
  const int kind = static_cast<int>(unit(gen) * 4);
  for (std::size_t i = 0; i < n; ++i) {
    double t;
    switch (kind) {
      case 0:  // independent values
        t = unit(gen);
        break;
      case 1:  // blocky data with jumps to the bounds
        t = (i / 3) % 2 ? 1.0 : (unit(gen) < 0.3 ? 0.0 : unit(gen));
        break;
      case 2:  // alternating extremes
        t = i % 2 ? 1.0 - 0.05 * unit(gen) : 0.05 * unit(gen);
        break;
      default:  // mostly interior with rare spikes
        t = unit(gen) < 0.15 ? (unit(gen) < 0.5 ? 0.0 : 1.0) : 0.3 + 0.4 * unit(gen);
    }
    means[i] = m + (M - m) * t;
  }
  return means;
}

inline double random_c(std::mt19937& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = unit(gen);
  if (r < 0.3) return 4.0;
  if (r < 0.5) return 10.0;
  if (r < 0.6) return 2.0;
  return 2.0 + 13.0 * unit(gen);
}

inline Bounds random_bounds(std::mt19937& gen) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(gen) < 0.5) return Bounds::of(0.0, 1.0);
  const double m = -2.0 + 4.0 * unit(gen);
  return Bounds::of(m, m + 0.1 + 3.0 * unit(gen));
}

inline Fixture admissible_fixture(std::mt19937& gen) {
  std::uniform_int_distribution<std::size_t> size(4, 48);
  Fixture f;
  f.bounds = random_bounds(gen);
  f.c = random_c(gen);
  std::size_t n = size(gen);
  if (f.c == 2.0 && n % 2 == 0) ++n;
  Field means = random_means(gen, n, f.bounds.m, f.bounds.M);
  f.u = solve_weighting(WeightOperator(n, f.c), means);
  return f;
}

inline Fixture admissible_bounded_fixture(std::mt19937& gen) {
  std::uniform_int_distribution<std::size_t> size(4, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Fixture f;
  f.bounds = random_bounds(gen);
  f.c = random_c(gen);
  const std::size_t n = size(gen);
  Field means = random_means(gen, n, f.bounds.m, f.bounds.M);
  if (unit(gen) < 0.5) {
    f.edges = LineEdges::absent();
    f.u = solve_weighting(WeightOperator(n, f.c, Topology::truncated), means);
  } else {
    if (f.c == 2.0) f.c = 4.0;
    const double left = f.bounds.m + (f.bounds.M - f.bounds.m) * unit(gen);
    const double right = f.bounds.m + (f.bounds.M - f.bounds.m) * unit(gen);
    f.edges = LineEdges::fixed(left, right);
    f.u = solve_weighting(WeightOperator(n, f.c, Topology::dirichlet_rectangular), means, left, right);
  }
  return f;
}

}  // namespace cbp::test
