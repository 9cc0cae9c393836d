#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cbp/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bound-preserving compact finite difference solver"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read key = value settings from a file; command-line flags win");

  cbp::RunConfig cfg;
  std::string integrator = "ms4";
  std::string dt_scale = "cfl";
  std::string refine;
  double tvb_p = -1.0;
  double alpha1 = 0.0, alpha2 = 0.0, final_time = 0.0, dt_coefficient = 0.0;
  bool bp = false, serial = false;

  app.add_option("--problem", cfg.problem, "Problem id")
      ->check(CLI::IsMember(cbp::builtin_ids()))
      ->capture_default_str();
  app.add_option("--order", cfg.order, "Spatial accuracy order")->check(CLI::IsMember({4, 6, 8}))->capture_default_str();
  auto* a1 = app.add_option("--alpha1", alpha1, "Sixth-order first-derivative parameter");
  auto* a2 = app.add_option("--alpha2", alpha2, "Sixth-order second-derivative parameter");
  app.add_option("--integrator", integrator, "Time integrator")
      ->check(CLI::IsMember({"fe", "ms4", "rk4"}))
      ->capture_default_str();
  app.add_option("--N", cfg.n, "Grid points per direction")->check(CLI::PositiveNumber)->capture_default_str();
  auto* tf = app.add_option("--T", final_time, "Final time (defaults to the problem's)");
  app.add_flag("--bp-limiter", bp, "Enable the bound-preserving limiter");
  auto* tvb = app.add_option("--tvb", tvb_p, "Enable TVB flux limiting with parameter p");
  app.add_option("--out", cfg.out_dir, "Directory for CSV output");
  app.add_option("--refine", refine, "Comma-separated grid sizes for a study");
  app.add_option("--dt-scale", dt_scale, "Convective time-step scaling")->check(CLI::IsMember({"cfl", "dx2"}));
  auto* dtc = app.add_option("--dt-coefficient", dt_coefficient, "dt as a multiple of the forward-Euler bound");
  app.add_option("--pme-m", cfg.pme_m, "Porous-medium exponent")->check(CLI::Range(2, 20))->capture_default_str();
  app.add_flag("--serial", serial, "Run refinement levels one after another");

  auto* solve = app.add_subcommand("solve", "Run one simulation and write the final field");
  auto* study = app.add_subcommand("study", "Run a convergence study over --refine");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*a1) cfg.alpha1 = alpha1;
    if (*a2) cfg.alpha2 = alpha2;
    if (*tf) cfg.final_time = final_time;
    if (*tvb) cfg.tvb_p = tvb_p;
    if (*dtc) cfg.dt_coefficient = dt_coefficient;
    cfg.bp_limiter = bp;
    cfg.parallel = !serial;
    cfg.dt_scale = dt_scale == "dx2" ? cbp::DtScale::dx2 : cbp::DtScale::cfl;
    static const std::map<std::string, cbp::Method> methods{
        {"fe", cbp::Method::forward_euler}, {"ms4", cbp::Method::ssp_ms4}, {"rk4", cbp::Method::ssp_rk4}};
    cfg.integrator = methods.at(integrator);
    if (!refine.empty()) {
      cfg.refine.clear();
      std::size_t pos = 0;
      while (pos <= refine.size()) {
        const std::size_t comma = std::min(refine.find(',', pos), refine.size());
        cfg.refine.push_back(std::stoul(refine.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    }

    if (*solve) {
      cbp::SingleResult r = cbp::run_single(cfg);
      const auto& s = r.sim;
      auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
      std::printf("problem %s  N=%zu  T=%g  dt=%.6e  steps=%zu\n", cfg.problem.c_str(), s.n, s.t_final, s.dt, s.steps);
      std::printf("final min %.15e  max %.15e\n", *lo, *hi);
      std::printf("run   min %.15e  max %.15e\n", s.run_min, s.run_max);
      if (s.periodic) std::printf("conservation drift %.3e\n", std::abs(s.sum_final - s.sum0) * s.cell);
      std::printf("limiter modified %zu values, step III %s\n", s.report.modified_count,
                  s.report.step3_triggered ? "triggered" : "not triggered");
      if (cfg.out_dir.empty()) std::cout << r.csv;
    } else if (*study) {
      cbp::StudyResult r = cbp::run_convergence_study(cfg);
      if (r.reference_is_self) std::printf("reference: self-run at 4N (no exact solution)\n");
      std::cout << cbp::format_table(r.rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
