#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsys/dynamics.hpp"
#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"

namespace chsys {

/// Parsed run configuration. JSON layout:
///   {scenario, grid: {xi_min, xi_max, n, align?}, spatial_grid?: {xi_min, xi_max, n},
///    integrator: {dt, t_end, snapshot_times, drift_budget, energy_budget?, clip_tol?},
///    scenario_params: {...}, perturbed_params?: {...}, metric?: {M, chain_length, ratio_cap},
///    convergence?: {levels}, output_dir, seed}
struct ScenarioConfig {
  std::string scenario;
  GridPtr grid;          // Lagrangian grid
  GridPtr spatial_grid;  // Eulerian grid; defaults to the Lagrangian grid's extent
  std::string align = "none";
  IntegratorConfig integrator;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json perturbed_params = nlohmann::json::object();
  double M = 10.0;
  std::size_t chain_length = 2;
  double ratio_cap = 1e3;
  std::size_t levels = 3;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  nlohmann::json raw;
};

/// Throws ConfigError on a missing or malformed field or an unknown scenario.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Output directory with CHSYS_OUTPUT_ROOT prepended when the configured path is relative.
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

/// Lagrangian label of the crest of a single peakon, x0 + c^2. With grid.align = "cell" or "node"
/// the peakon scenarios move their grid so crest labels sit at cell midpoints or nodes.
double peakon_crest_label(double c, double x0);

struct InitialData {
  std::optional<EulerianState> eulerian;  // absent for scenarios defined in Lagrangian variables
  LagrangianState lagrangian;
};

/// Initial state of the configured scenario; `params` overrides cfg.params key by key.
InitialData initial_data(const ScenarioConfig& cfg, const nlohmann::json& overrides = nlohmann::json::object());

struct ScenarioResult {
  nlohmann::json summary;
  Trajectory trajectory;
  std::vector<EulerianState> eulerian_snapshots;  // zero state where the conversion failed
  double runtime_seconds = 0.0;
};

/// Evolves the scenario and, if output_dir is set, writes snapshots, diagnostics.txt, summary.json
/// and timing.json. On IntegrationError the partial outputs and a failure summary are written
/// before the error is rethrown.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Distance estimates between the scenario evolved from scenario_params and from
/// perturbed_params, at every snapshot time, with the ratio upper(t) / lower(0).
nlohmann::json run_metric_study(const ScenarioConfig& cfg);

/// Single-peakon refinement sweep: error of U against c e^{-|y - x0 - ct|} at the Lagrangian nodes
/// for `levels` successive halvings of dxi and dt.
nlohmann::json run_convergence(const ScenarioConfig& cfg);

}  // namespace chsys
