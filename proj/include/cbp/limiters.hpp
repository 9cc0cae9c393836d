#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/field.hpp"
#include "cbp/operators.hpp"

namespace cbp {

struct Bounds {
  double m = 0.0;
  double M = 1.0;
  double tolerance = 1e-12;

  static Bounds of(double m, double M) {
    if (!(m < M)) throw std::invalid_argument("bounds require m < M");
    return {m, M, 1e-12 * std::max({1.0, std::abs(m), std::abs(M)})};
  }

  bool contains(double v) const noexcept { return v >= m && v <= M; }
};

struct LimiterReport {
  std::size_t modified_count = 0;
  double max_displacement = 0.0;
  double conservation_residual = 0.0;
  std::size_t class1_count = 0;
  bool step3_triggered = false;
  bool degenerate_fallback_used = false;
  /// Net mass exchanged with fixed (non-modifiable) boundary neighbours on bounded lines.
  double boundary_exchange = 0.0;

  void merge(const LimiterReport& o) {
    modified_count += o.modified_count;
    max_displacement = std::max(max_displacement, o.max_displacement);
    conservation_residual += o.conservation_residual;
    class1_count += o.class1_count;
    step3_triggered = step3_triggered || o.step3_triggered;
    degenerate_fallback_used = degenerate_fallback_used || o.degenerate_fallback_used;
    boundary_exchange += o.boundary_exchange;
  }
};

/// Point values recovered from weighted means, with the limiter diagnostics.
struct Recovered {
  Field u;
  LimiterReport report;
};

/// How a line ends. Periodic lines wrap; `absent` drops the missing neighbour from the
/// weighting row (normalization c+1); `fixed` has a prescribed neighbour value that enters the
/// mean (normalization c+2) but is never modified.
struct LineEdges {
  enum class Kind { periodic, absent, fixed };
  Kind kind = Kind::periodic;
  double left = 0.0;
  double right = 0.0;

  static LineEdges periodic() { return {}; }
  static LineEdges absent() { return {Kind::absent, 0.0, 0.0}; }
  static LineEdges fixed(double left, double right) { return {Kind::fixed, left, right}; }
};

enum class SweepOrder { ascending, descending };

/// Inclusive index range; in periodic data `first > last` means the range wraps.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SetClassification {
  std::vector<IndexRange> class1_sets;
  std::vector<IndexRange> class2_sets;
  bool degenerate_whole_circle = false;
};

namespace detail {

inline int status(double v, const Bounds& b) { return v < b.m ? -1 : (v > b.M ? 1 : 0); }

struct Run {
  std::vector<std::size_t> interior;
  bool has_under = false;
  bool has_over = false;
  std::ptrdiff_t left_flank = -1;
  std::ptrdiff_t right_flank = -1;
};

/// Maximal runs of out-of-range points. Returns false when a periodic line has no in-range point.
inline bool find_runs(const std::vector<double>& u, const Bounds& b, bool periodic, std::vector<Run>& runs) {
  const std::size_t n = u.size();
  runs.clear();
  std::size_t start = 0;
  if (periodic) {
    std::size_t k = 0;
    while (k < n && status(u[k], b) != 0) ++k;
    if (k == n) return false;
    start = k;
  }
  Run cur;
  bool open = false;
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t i = periodic ? (start + s) % n : s;
    int st = status(u[i], b);
    if (st != 0) {
      if (!open) {
        cur = Run{};
        open = true;
        if (periodic)
          cur.left_flank = static_cast<std::ptrdiff_t>((i + n - 1) % n);
        else if (i > 0)
          cur.left_flank = static_cast<std::ptrdiff_t>(i - 1);
      }
      cur.interior.push_back(i);
      (st < 0 ? cur.has_under : cur.has_over) = true;
    } else if (open) {
      cur.right_flank = static_cast<std::ptrdiff_t>(i);
      runs.push_back(std::move(cur));
      open = false;
    }
  }
  if (open) {
    if (periodic) cur.right_flank = static_cast<std::ptrdiff_t>(start);
    runs.push_back(std::move(cur));
  }
  return true;
}

inline double mean_at(const std::vector<double>& u, std::size_t i, double c, const LineEdges& e) {
  const std::size_t n = u.size();
  switch (e.kind) {
    case LineEdges::Kind::periodic:
      return (u[(i + n - 1) % n] + c * u[i] + u[(i + 1) % n]) / (c + 2.0);
    case LineEdges::Kind::fixed: {
      double l = i == 0 ? e.left : u[i - 1];
      double r = i + 1 == n ? e.right : u[i + 1];
      return (l + c * u[i] + r) / (c + 2.0);
    }
    case LineEdges::Kind::absent: {
      if (n == 1) return u[0];
      if (i == 0) return (c * u[0] + u[1]) / (c + 1.0);
      if (i + 1 == n) return (u[n - 2] + c * u[n - 1]) / (c + 1.0);
      return (u[i - 1] + c * u[i] + u[i + 1]) / (c + 2.0);
    }
  }
  return u[i];
}

inline void check_precondition(const std::vector<double>& u, const Bounds& b, double c, const LineEdges& e,
                               bool lower_only = false) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    double mean = mean_at(u, i, c, e);
    if (mean < b.m - b.tolerance || (!lower_only && mean > b.M + b.tolerance))
      throw WeakMonotonicityViolation(i, mean, b.m, b.M);
  }
}

/// Neighbour of i on `side` (-1 / +1): index into the line, or -1 for a fixed value, or -2 for none.
inline std::ptrdiff_t neighbour(std::size_t i, int side, std::size_t n, const LineEdges& e) {
  if (e.kind == LineEdges::Kind::periodic) return static_cast<std::ptrdiff_t>((i + n + side) % n);
  if (side < 0 && i == 0) return e.kind == LineEdges::Kind::fixed ? -1 : -2;
  if (side > 0 && i + 1 == n) return e.kind == LineEdges::Kind::fixed ? -1 : -2;
  return static_cast<std::ptrdiff_t>(i) + side;
}

class Engine {
 public:
  Engine(std::vector<double> u, const Bounds& b, const LineEdges& e) : u_(std::move(u)), v_(u_), b_(b), e_(e) {}

  std::vector<double>& result() { return v_; }
  const std::vector<double>& input() const { return u_; }
  LimiterReport& report() { return report_; }

  /// Three-point redistribution of one out-of-range point (ratios from frozen u).
  void redistribute(std::size_t i) {
    const std::size_t n = u_.size();
    const bool under = u_[i] < b_.m;
    const double target = under ? b_.m : b_.M;
    const double excess = under ? b_.m - u_[i] : u_[i] - b_.M;
    std::ptrdiff_t nb[2] = {neighbour(i, -1, n, e_), neighbour(i, 1, n, e_)};
    double room[2] = {0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
      double val;
      if (nb[s] >= 0)
        val = u_[static_cast<std::size_t>(nb[s])];
      else if (nb[s] == -1)
        val = s == 0 ? e_.left : e_.right;
      else
        continue;
      room[s] = under ? std::max(val - b_.m, 0.0) : std::max(b_.M - val, 0.0);
    }
    const double den = room[0] + room[1];
    if (den < 1e-14) {
      if (excess > b_.tolerance)
        throw InfeasibleRedistribution("no headroom next to out-of-range point " + std::to_string(i));
      v_[i] = target;
      return;
    }
    for (int s = 0; s < 2; ++s) {
      if (room[s] == 0.0) continue;
      double share = room[s] / den * excess;
      if (nb[s] >= 0)
        v_[static_cast<std::size_t>(nb[s])] += under ? -share : share;
      else
        report_.boundary_exchange += under ? share : -share;
    }
    v_[i] = target;
  }

  /// Proportional redistribution over a saw-tooth set S = flanks + interior.
  void saw_tooth(const std::vector<std::size_t>& interior, const std::vector<std::size_t>& flanks) {
    double U = 0.0;
    for (auto i : interior) U += v_[i];
    for (auto i : flanks) U += v_[i];
    for (auto i : interior) v_[i] = u_[i] < b_.m ? b_.m : b_.M;
    double V = 0.0, A = 0.0, B = 0.0;
    auto accumulate = [&](std::size_t i) {
      V += v_[i];
      A += v_[i] - b_.m;
      B += b_.M - v_[i];
    };
    for (auto i : interior) accumulate(i);
    for (auto i : flanks) accumulate(i);
    const double tol = b_.tolerance * static_cast<double>(interior.size() + flanks.size());
    auto shift = [&](auto&& fn) {
      for (auto i : interior) fn(i);
      for (auto i : flanks) fn(i);
    };
    if (V > U) {
      const double d = V - U;
      if (d > A + tol) throw InfeasibleRedistribution("saw-tooth set mass below N*m");
      if (A <= 0.0) return;
      const double r = std::min(d / A, 1.0);
      shift([&](std::size_t i) { v_[i] -= (v_[i] - b_.m) * r; });
    } else if (U > V) {
      const double d = U - V;
      if (d > B + tol) throw InfeasibleRedistribution("saw-tooth set mass above N*M");
      if (B <= 0.0) return;
      const double r = std::min(d / B, 1.0);
      shift([&](std::size_t i) { v_[i] += (b_.M - v_[i]) * r; });
    }
    report_.step3_triggered = true;
  }

  void finish() {
    double su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      double& v = v_[i];
      if (v < b_.m) {
        if (b_.m - v > b_.tolerance) throw InfeasibleRedistribution("limiter output below m");
        v = b_.m;
      } else if (v > b_.M) {
        if (v - b_.M > b_.tolerance) throw InfeasibleRedistribution("limiter output above M");
        v = b_.M;
      }
      su += u_[i];
      sv += v;
      if (v != u_[i]) {
        ++report_.modified_count;
        report_.max_displacement = std::max(report_.max_displacement, std::abs(v - u_[i]));
      }
    }
    report_.conservation_residual = std::abs(sv - su - report_.boundary_exchange);
  }

 private:
  std::vector<double> u_;
  std::vector<double> v_;
  Bounds b_;
  LineEdges e_;
  LimiterReport report_;
};

template <Line L>
std::vector<double> copy_line(const L& line) {
  std::vector<double> out(line.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = line[i];
  return out;
}

template <Line L>
bool all_in_range(const L& line, const Bounds& b) {
  for (std::size_t i = 0; i < line.size(); ++i)
    if (!b.contains(line[i])) return false;
  return true;
}

}  // namespace detail

/// Algorithm 2 on one line, in place.
template <MutableLine L>
LimiterReport limit_bounds_line(L&& line, const Bounds& b, double c, const LineEdges& edges = LineEdges::periodic(),
                                SweepOrder order = SweepOrder::ascending) {
  if (!(c >= 2.0)) throw std::domain_error("limiter requires c >= 2");
  if (detail::all_in_range(line, b)) return {};
  const bool periodic = edges.kind == LineEdges::Kind::periodic;
  std::vector<double> u = detail::copy_line(line);
  detail::check_precondition(u, b, c, edges);

  detail::Engine eng(u, b, edges);
  std::vector<detail::Run> runs;
  if (!detail::find_runs(u, b, periodic, runs)) {
    std::vector<std::size_t> all(u.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    eng.saw_tooth(all, {});
    eng.report().degenerate_fallback_used = true;
    eng.report().class1_count = 1;
  } else {
    std::vector<std::size_t> class2;
    std::vector<const detail::Run*> class1;
    for (const auto& r : runs) {
      if (r.has_under && r.has_over)
        class1.push_back(&r);
      else
        class2.insert(class2.end(), r.interior.begin(), r.interior.end());
    }
    std::sort(class2.begin(), class2.end());
    if (order == SweepOrder::descending) std::reverse(class2.begin(), class2.end());
    for (auto i : class2) eng.redistribute(i);
    for (const auto* r : class1) {
      std::vector<std::size_t> flanks;
      if (r->left_flank >= 0) flanks.push_back(static_cast<std::size_t>(r->left_flank));
      if (r->right_flank >= 0 && r->right_flank != r->left_flank)
        flanks.push_back(static_cast<std::size_t>(r->right_flank));
      eng.saw_tooth(r->interior, flanks);
    }
    eng.report().class1_count = class1.size();
  }
  eng.finish();
  const auto& v = eng.result();
  for (std::size_t i = 0; i < v.size(); ++i) line[i] = v[i];
  return eng.report();
}

/// Algorithm 2 (two-sided bound-preserving limiter) on periodic data.
inline std::pair<Field, LimiterReport> limit_bounds(std::span<const double> u, const Bounds& b, double c,
                                                   SweepOrder order = SweepOrder::ascending) {
  Field out(u.begin(), u.end());
  auto rep = limit_bounds_line(out, b, c, LineEdges::periodic(), order);
  return {std::move(out), rep};
}

/// Algorithm 1 (lower bound only) on periodic data.
inline std::pair<Field, LimiterReport> limit_lower(std::span<const double> u, double m, double c) {
  if (!(c >= 2.0)) throw std::domain_error("limiter requires c >= 2");
  Field in(u.begin(), u.end());
  Bounds b{m, std::max(m, *std::max_element(in.begin(), in.end())) + 1.0, 1e-12 * std::max(1.0, std::abs(m))};
  bool clean = std::all_of(in.begin(), in.end(), [&](double x) { return x >= m; });
  if (clean) return {std::move(in), {}};
  detail::check_precondition(in, b, c, LineEdges::periodic(), true);
  detail::Engine eng(in, b, LineEdges::periodic());
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i] < m) eng.redistribute(i);
  eng.finish();
  return {std::move(eng.result()), eng.report()};
}

inline SetClassification classify_sets(std::span<const double> u, const Bounds& b) {
  SetClassification out;
  const std::size_t n = u.size();
  std::vector<double> v(u.begin(), u.end());
  std::vector<detail::Run> runs;
  if (!detail::find_runs(v, b, true, runs)) {
    out.degenerate_whole_circle = true;
    return out;
  }
  std::vector<IndexRange> c1;
  for (const auto& r : runs)
    if (r.has_under && r.has_over)
      c1.push_back({static_cast<std::size_t>(r.left_flank), static_cast<std::size_t>(r.right_flank)});
  if (c1.empty()) {
    out.class2_sets.push_back({0, n - 1});
    return out;
  }
  out.class1_sets = c1;
  // complement segments between consecutive class-I sets, sharing their boundary points
  for (std::size_t k = 0; k < c1.size(); ++k) {
    const IndexRange& a = c1[k];
    const IndexRange& nxt = c1[(k + 1) % c1.size()];
    if (a.last != nxt.first || c1.size() == 1) out.class2_sets.push_back({a.last, nxt.first});
  }
  return out;
}

inline double modified_minmod(std::span<const double> args, double p, double dx) {
  if (args.empty()) throw std::invalid_argument("modified_minmod needs at least one argument");
  if (std::abs(args[0]) <= p * dx * dx) return args[0];
  const double s = args[0] > 0.0 ? 1.0 : (args[0] < 0.0 ? -1.0 : 0.0);
  double mag = std::abs(args[0]);
  for (double a : args) {
    double sa = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    if (sa != s) return 0.0;
    mag = std::min(mag, std::abs(a));
  }
  return s * mag;
}

/// Limits point values through a factored weighting: the means are chain[0] chain[1] ... u.
/// Each level limits the partially recovered values at its own c, outermost first; levels
/// after an untouched one reuse the exact forward intermediates.
inline std::pair<Field, LimiterReport> cascade_limit(std::span<const double> u, const Bounds& b,
                                                    const std::vector<WeightOperator>& chain) {
  const std::size_t k = chain.size();
  if (k == 0) return {Field(u.begin(), u.end()), {}};
  for (const auto& w : chain) {
    require_size("cascade_limit", w.size(), u.size());
    if (w.topology() != Topology::periodic) throw std::invalid_argument("cascade_limit expects periodic weightings");
  }
  // x[j] = chain[j+1] ... chain[k-1] u, so chain[j] x[j] is the level-j mean
  std::vector<Field> x(k);
  x[k - 1] = Field(u.begin(), u.end());
  for (std::size_t j = k - 1; j-- > 0;) x[j] = apply_weighting(chain[j + 1], x[j + 1]);
  LimiterReport total;
  bool dirty = false;
  for (std::size_t j = 0; j < k; ++j) {
    auto rep = limit_bounds_line(x[j], b, chain[j].c());
    dirty = dirty || rep.modified_count > 0;
    total.merge(rep);
    if (dirty && j + 1 < k) chain[j + 1].solve_into(x[j], x[j + 1]);
  }
  return {std::move(x[k - 1]), total};
}

}  // namespace cbp
