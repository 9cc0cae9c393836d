#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbp/boundary.hpp"
#include "cbp/errors.hpp"
#include "cbp/problems.hpp"
#include "cbp/schemes1d.hpp"
#include "cbp/schemes2d.hpp"
#include "cbp/timeint.hpp"

namespace cbp {

struct RunConfig {
  std::string problem = "linadv-sin4";
  int order = 4;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  Method integrator = Method::ssp_ms4;
  bool bp_limiter = true;
  std::optional<double> tvb_p;
  std::vector<std::size_t> refine{20, 40, 80, 160};
  std::size_t n = 100;
  std::optional<double> final_time;
  std::string out_dir;
  DtScale dt_scale = DtScale::cfl;
  /// dt = coefficient * forward-Euler bound; defaults to C_ms (MS4), 5 C_ms (RK4) or 1 (FE).
  std::optional<double> dt_coefficient;
  int pme_m = 5;
  bool parallel = true;

  double coefficient() const {
    if (dt_coefficient) return *dt_coefficient;
    const double cms = ssp_ms4_method().ssp_coefficient();
    switch (integrator) {
      case Method::ssp_ms4:
        return cms;
      case Method::ssp_rk4:
        return 5.0 * cms;
      case Method::forward_euler:
        return 1.0;
    }
    return cms;
  }

  void validate() const {
    if (order != 4 && order != 6 && order != 8) throw std::invalid_argument("order must be 4, 6 or 8");
    for (std::size_t i = 1; i < refine.size(); ++i)
      if (refine[i] <= refine[i - 1]) throw std::invalid_argument("refinement list must be strictly increasing");
    if (dt_coefficient && !(*dt_coefficient > 0.0)) throw std::invalid_argument("dt coefficient must be positive");
    const NamedProblem p = builtin(problem, {pme_m});
    const bool periodic1d = !p.is_2d() && p.one_d().boundary == BoundaryKind::periodic;
    if (!periodic1d && order != 4) throw std::invalid_argument("only the fourth-order scheme exists for " + problem);
    if (tvb_p) {
      if (!(*tvb_p >= 0.0)) throw std::invalid_argument("TVB parameter p must be nonnegative");
      if (!periodic1d || p.one_d().diffusion.active() || order != 4)
        throw std::invalid_argument("TVB limiting needs a periodic 1D convection problem and order 4");
    }
  }
};

struct ErrorRow {
  std::size_t n = 0;
  double l1 = 0.0;
  double l1_order = std::numeric_limits<double>::quiet_NaN();
  double linf = 0.0;
  double linf_order = std::numeric_limits<double>::quiet_NaN();
  double min = 0.0;
  double max = 0.0;
  double conservation_drift = 0.0;
  double wall_seconds = 0.0;
};

struct ErrorNorms {
  double l1 = 0.0;
  double linf = 0.0;
};

inline ErrorNorms error_norms(std::span<const double> numeric, std::span<const double> exact, double dx) {
  require_size("error_norms", numeric.size(), exact.size());
  ErrorNorms e;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double d = std::abs(numeric[i] - exact[i]);
    e.l1 += d;
    e.linf = std::max(e.linf, d);
  }
  e.l1 *= dx;
  return e;
}

inline double observed_order(double coarse, double fine, double ratio = 2.0) {
  return std::log(coarse / fine) / std::log(ratio);
}

/// Outcome of one simulation at one resolution.
struct Simulation {
  std::size_t n = 0;
  std::vector<double> x, y;  // y empty in 1D
  Field u;
  Field exact;                // empty when no exact solution is known
  double cell = 0.0;          // dx (1D) or dx*dy (2D)
  double domain = 0.0;        // length or area
  double dt = 0.0;
  std::size_t steps = 0;
  double t_final = 0.0;
  double run_min = 0.0, run_max = 0.0;  // extrema over every accepted step
  double sum0 = 0.0, sum_final = 0.0;
  bool periodic = true;
  LimiterReport report;
};

namespace detail {

template <class S>
Simulation finish_run(const S& s, Field u0, double t0, double T, double fe_dt, const RunConfig& cfg, Simulation sim) {
  double lo = *std::min_element(u0.begin(), u0.end());
  double hi = *std::max_element(u0.begin(), u0.end());
  for (double v : u0) sim.sum0 += v;
  IntegratorSpec spec = IntegratorSpec::make(cfg.integrator);
  const double dt_max = cfg.coefficient() * fe_dt;
  auto observe = [&](const StepRecord& r, const Field&) {
    lo = std::min(lo, r.min);
    hi = std::max(hi, r.max);
  };
  IntegrationResult res = integrate_to(s, std::move(u0), t0, T, dt_max, spec, cfg.bp_limiter, fe_dt, observe);
  sim.u = std::move(res.u);
  sim.dt = res.dt;
  sim.steps = res.steps;
  sim.t_final = T;
  sim.run_min = lo;
  sim.run_max = hi;
  for (double v : sim.u) sim.sum_final += v;
  sim.report = res.report;
  return sim;
}

}  // namespace detail

/// Runs `cfg` at resolution n. Periodic grids have n points with dx = L/n; bounded grids have
/// nodes x_0..x_n (n-1 interior unknowns), also with dx = L/n.
inline Simulation simulate(const RunConfig& cfg, std::size_t n) {
  const NamedProblem np = builtin(cfg.problem, {cfg.pme_m});
  Simulation sim;
  sim.n = n;
  if (np.is_2d()) {
    if (cfg.order != 4) throw std::invalid_argument("2D problems use the fourth-order scheme");
    const ProblemSpec2D& p = np.two_d();
    PeriodicScheme2D s(p, n, n);
    const double T = cfg.final_time.value_or(p.final_time);
    sim.x = s.x_grid();
    sim.y = s.y_grid();
    sim.cell = s.dx() * s.dy();
    sim.domain = (p.x_hi - p.x_lo) * (p.y_hi - p.y_lo);
    Simulation out = detail::finish_run(s, s.initial(), p.start_time, T, s.forward_euler_dt(), cfg, std::move(sim));
    if (p.exact) out.exact = s.sample([&](double x, double y) { return p.exact(x, y, T); });
    return out;
  }
  const ProblemSpec1D& p = np.one_d();
  const double T = cfg.final_time.value_or(p.final_time);
  sim.domain = p.length();
  auto sample_exact = [&](Simulation& out) {
    if (!p.exact) return;
    out.exact.resize(out.x.size());
    for (std::size_t i = 0; i < out.x.size(); ++i) out.exact[i] = p.exact(out.x[i], T);
  };
  if (p.boundary == BoundaryKind::periodic) {
    SchemeOptions o;
    o.order = cfg.order;
    o.alpha1 = cfg.alpha1;
    o.alpha2 = cfg.alpha2;
    o.tvb_p = cfg.tvb_p;
    PeriodicScheme1D s(p, n, o);
    sim.x = s.grid();
    sim.cell = s.dx();
    const DtScale scale = s.mode() == Mode::convection ? cfg.dt_scale : DtScale::cfl;
    Simulation out = detail::finish_run(s, s.initial(), p.start_time, T, s.forward_euler_dt(scale), cfg, std::move(sim));
    sample_exact(out);
    return out;
  }
  if (n < 5) throw std::invalid_argument("bounded problems need n >= 5");
  sim.periodic = false;
  auto run_bounded = [&](const auto& s) {
    sim.x = s.grid();
    sim.cell = s.dx();
    Field u0(sim.x.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = p.initial(sim.x[i]);
    u0.front() = p.left(p.start_time);
    if (p.right) u0.back() = p.right(p.start_time);
    Simulation out = detail::finish_run(s, std::move(u0), p.start_time, T, s.forward_euler_dt(), cfg, std::move(sim));
    sample_exact(out);
    return out;
  };
  if (p.boundary == BoundaryKind::inflow_outflow) return run_bounded(InflowOutflowScheme(p, n - 1));
  return run_bounded(DirichletScheme(p, n - 1));
}

namespace detail {

/// Samples a 4x finer self-run at the coarse nodes.
inline Field reference_at_coarse(const Simulation& coarse, const Simulation& fine, bool two_d) {
  Field ref(coarse.u.size());
  if (two_d) {
    const std::size_t n = coarse.n, nf = fine.n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ref[i * n + j] = fine.u[(4 * (i + 1) - 1) * nf + 4 * (j + 1) - 1];
  } else if (coarse.periodic) {
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = fine.u[4 * (i + 1) - 1];
  } else {
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = fine.u[4 * i];
  }
  return ref;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

struct StudyResult {
  std::vector<ErrorRow> rows;
  bool reference_is_self = false;
  std::string csv;
};

struct SingleResult {
  Simulation sim;
  std::string csv;
};

class CsvWriter {
 public:
  void meta(const std::string& key, const std::string& value) { out_ << "# " << key << ": " << value << "\r\n"; }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << "\r\n";
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  std::ostringstream out_;
};

inline void write_config_meta(CsvWriter& w, const RunConfig& cfg) {
  w.meta("problem", cfg.problem);
  w.meta("order", std::to_string(cfg.order));
  if (cfg.alpha1) w.meta("alpha1", detail::fmt(*cfg.alpha1));
  if (cfg.alpha2) w.meta("alpha2", detail::fmt(*cfg.alpha2));
  w.meta("integrator", method_name(cfg.integrator));
  w.meta("bp_limiter", cfg.bp_limiter ? "on" : "off");
  w.meta("tvb", cfg.tvb_p ? detail::fmt(*cfg.tvb_p) : "off");
  w.meta("dt_coefficient", detail::fmt(cfg.coefficient()));
  w.meta("dt_scale", cfg.dt_scale == DtScale::dx2 ? "dx2" : "cfl");
  if (cfg.problem.find("pme") != std::string::npos) w.meta("pme_m", std::to_string(cfg.pme_m));
}

inline void save_if_requested(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (std::filesystem::path(dir) / name).string());
  f << text;
}

/// Convergence study over cfg.refine. L1 is reported as the domain average dx*sum|e| / |domain|.
inline StudyResult run_convergence_study(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.refine.empty()) throw std::invalid_argument("refinement list is empty");
  const NamedProblem np = builtin(cfg.problem, {cfg.pme_m});
  StudyResult out;
  out.reference_is_self = !np.has_exact();

  struct Level {
    Simulation sim;
    Field reference;
    double seconds = 0.0;
  };
  auto run_level = [&](std::size_t n) {
    const auto t0 = std::chrono::steady_clock::now();
    Level lv;
    try {
      lv.sim = simulate(cfg, n);
      if (out.reference_is_self) lv.reference = detail::reference_at_coarse(lv.sim, simulate(cfg, 4 * n), np.is_2d());
      else lv.reference = lv.sim.exact;
    } catch (const std::exception& e) {
      throw std::runtime_error("study failed at N=" + std::to_string(n) + ": " + e.what());
    }
    lv.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return lv;
  };

  std::vector<Level> levels;
  if (cfg.parallel) {
    std::vector<std::future<Level>> jobs;
    for (std::size_t n : cfg.refine) jobs.push_back(std::async(std::launch::async, run_level, n));
    for (auto& j : jobs) levels.push_back(j.get());
  } else {
    for (std::size_t n : cfg.refine) levels.push_back(run_level(n));
  }

  for (std::size_t k = 0; k < levels.size(); ++k) {
    const Simulation& s = levels[k].sim;
    ErrorNorms e = error_norms(s.u, levels[k].reference, s.cell);
    ErrorRow r;
    r.n = s.n;
    r.l1 = e.l1 / s.domain;
    r.linf = e.linf;
    r.min = s.run_min;
    r.max = s.run_max;
    r.conservation_drift = s.periodic ? std::abs(s.sum_final - s.sum0) * s.cell : 0.0;
    r.wall_seconds = levels[k].seconds;
    if (k > 0) {
      const double ratio = static_cast<double>(s.n) / static_cast<double>(out.rows.back().n);
      r.l1_order = observed_order(out.rows.back().l1, r.l1, ratio);
      r.linf_order = observed_order(out.rows.back().linf, r.linf, ratio);
    }
    out.rows.push_back(r);
  }

  CsvWriter w;
  write_config_meta(w, cfg);
  w.meta("final_time", detail::fmt(levels.front().sim.t_final));
  w.meta("reference", out.reference_is_self ? "self-run at 4N" : "exact");
  w.meta("l1_normalization", "dx*sum|e| / domain");
  w.row({"N", "L1", "L1_order", "Linf", "Linf_order", "min", "max", "conservation_drift"});
  for (const auto& r : out.rows)
    w.row({std::to_string(r.n), detail::fmt(r.l1), std::isnan(r.l1_order) ? "" : detail::fmt(r.l1_order),
           detail::fmt(r.linf), std::isnan(r.linf_order) ? "" : detail::fmt(r.linf_order), detail::fmt(r.min),
           detail::fmt(r.max), detail::fmt(r.conservation_drift)});
  out.csv = w.str();
  save_if_requested(cfg.out_dir, cfg.problem + "_study.csv", out.csv);
  return out;
}

inline std::string format_table(const std::vector<ErrorRow>& rows) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%6s %11s %7s %11s %7s %12s %12s %10s\n", "N", "L1", "order", "Linf", "order", "min",
                "max", "seconds");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%6zu %11.3e %7.2f %11.3e %7.2f %12.5e %12.5e %10.2f\n", r.n, r.l1,
                  std::isnan(r.l1_order) ? 0.0 : r.l1_order, r.linf, std::isnan(r.linf_order) ? 0.0 : r.linf_order,
                  r.min, r.max, r.wall_seconds);
    os << buf;
  }
  return os.str();
}

/// Single run at cfg.n; the CSV holds the final field and a metadata block with the diagnostics.
inline SingleResult run_single(const RunConfig& cfg) {
  cfg.validate();
  const NamedProblem np = builtin(cfg.problem, {cfg.pme_m});
  SingleResult out{simulate(cfg, cfg.n), {}};
  const Simulation& s = out.sim;
  CsvWriter w;
  write_config_meta(w, cfg);
  w.meta("N", std::to_string(s.n));
  w.meta("final_time", detail::fmt(s.t_final));
  w.meta("dt", detail::fmt(s.dt));
  w.meta("steps", std::to_string(s.steps));
  auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
  w.meta("min", detail::fmt(*lo));
  w.meta("max", detail::fmt(*hi));
  w.meta("run_min", detail::fmt(s.run_min));
  w.meta("run_max", detail::fmt(s.run_max));
  if (s.periodic) w.meta("conservation_drift", detail::fmt(std::abs(s.sum_final - s.sum0) * s.cell));
  w.meta("limiter_modified", std::to_string(s.report.modified_count));
  w.meta("limiter_max_displacement", detail::fmt(s.report.max_displacement));
  w.meta("limiter_step3", s.report.step3_triggered ? "yes" : "no");
  const bool ex = !s.exact.empty();
  if (np.is_2d()) {
    w.row(ex ? std::vector<std::string>{"x", "y", "u", "u_exact"} : std::vector<std::string>{"x", "y", "u"});
    for (std::size_t i = 0; i < s.x.size(); ++i)
      for (std::size_t j = 0; j < s.y.size(); ++j) {
        const std::size_t k = i * s.y.size() + j;
        std::vector<std::string> cells{detail::fmt(s.x[i]), detail::fmt(s.y[j]), detail::fmt(s.u[k])};
        if (ex) cells.push_back(detail::fmt(s.exact[k]));
        w.row(cells);
      }
  } else {
    w.row(ex ? std::vector<std::string>{"x", "u", "u_exact"} : std::vector<std::string>{"x", "u"});
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::vector<std::string> cells{detail::fmt(s.x[i]), detail::fmt(s.u[i])};
      if (ex) cells.push_back(detail::fmt(s.exact[i]));
      w.row(cells);
    }
  }
  out.csv = w.str();
  save_if_requested(cfg.out_dir, cfg.problem + "_N" + std::to_string(s.n) + ".csv", out.csv);
  return out;
}

}  // namespace cbp
