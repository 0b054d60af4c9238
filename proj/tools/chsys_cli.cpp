// Command-line driver: run | metric | converge | check.
// Exit codes: 0 ok, 1 state fails its membership check, 2 configuration or input error,
// 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chsys/errors.hpp"
#include "chsys/io.hpp"
#include "chsys/scenario.hpp"

namespace {

using nlohmann::json;

int check_state(const std::string& path, double tol) {
  const auto state = chsys::io::load(path);
  json out;
  bool ok = false;
  if (const auto* X = std::get_if<chsys::LagrangianState>(&state)) {
    const auto r = chsys::check_in_G(*X, tol);
    out = {{"kind", "lagrangian"},
           {"in_G", r.in_G},
           {"in_F0", r.in_F0},
           {"max_negative_yxi", r.max_negative_yxi},
           {"max_negative_hxi", r.max_negative_hxi},
           {"min_sum_yxi_hxi", r.min_sum_yxi_hxi},
           {"max_lagcoord3_residual", r.max_lagcoord3_residual},
           {"h_monotonicity_violation", r.h_monotonicity_violation},
           {"left_decay", r.left_decay},
           {"consistency_residual", r.consistency_residual},
           {"f0_residual", r.f0_residual},
           {"h_sup", r.h_sup},
           {"norm_E", r.norm_E}};
    ok = r.in_G;
  } else {
    const auto& z = std::get<chsys::EulerianState>(state);
    const auto r = chsys::check_in_D(z, tol);
    out = {{"kind", "eulerian"},
           {"in_D", r.in_D},
           {"structurally_valid", r.structurally_valid},
           {"max_density_residual", r.max_density_residual},
           {"total_energy", r.total_energy}};
    ok = r.in_D;
  }
  std::cout << out.dump(2) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative two-component Camassa-Holm solver"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "Evolve a scenario and write snapshots, diagnostics and a summary");
  run->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  auto* metric = app.add_subcommand("metric", "Distance estimates between two evolved solutions");
  metric->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  auto* converge = app.add_subcommand("converge", "Refinement study for the single peakon");
  converge->add_option("config", config, "JSON configuration")->required()->check(CLI::ExistingFile);

  std::string state_file;
  double tol = 1e-8;
  auto* check = app.add_subcommand("check", "Membership tests for a saved state");
  check->add_option("state", state_file, "State file")->required()->check(CLI::ExistingFile);
  check->add_option("--tol", tol, "Tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return check_state(state_file, tol);
    const auto cfg = chsys::load_config(config);
    if (*run) {
      const auto res = chsys::run_scenario(cfg);
      std::cout << res.summary.dump(2) << '\n';
    } else if (*metric) {
      const auto report = chsys::run_metric_study(cfg);
      std::cout << report.dump(2) << '\n';
      if (report.at("flagged").get<bool>()) return 3;
    } else if (*converge) {
      std::cout << chsys::run_convergence(cfg).dump(2) << '\n';
    }
  } catch (const chsys::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const chsys::StructuralError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const chsys::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
