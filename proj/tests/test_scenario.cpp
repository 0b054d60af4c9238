#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chsys/errors.hpp"
#include "chsys/scenario.hpp"

using namespace chsys;
using nlohmann::json;

namespace {

json base_config(const std::string& scenario, const std::string& out) {
  return {{"scenario", scenario},
          {"grid", {{"xi_min", -10.0}, {"xi_max", 12.0}, {"n", 441}}},
          {"spatial_grid", {{"xi_min", -10.0}, {"xi_max", 10.0}, {"n", 401}}},
          {"integrator", {{"dt", 0.02}, {"t_end", 0.4}, {"snapshot_times", {0.0, 0.2, 0.4}}, {"drift_budget", 1e-6}}},
          {"scenario_params", json::object()},
          {"output_dir", out},
          {"seed", 7}};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config errors") {
  CHECK_NOTHROW(parse_config(base_config("ground", "")));
  auto bad = [](auto mutate) {
    auto j = base_config("ground", "");
    mutate(j);
    return j;
  };
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j.erase("grid"); })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["scenario"] = "nope"; })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["n"] = 1; })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["xi_max"] = -20.0; })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["grid"]["n"] = "many"; })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["integrator"]["dt"] = -0.1; })), ConfigError);
  CHECK_THROWS_AS(parse_config(bad([](json& j) { j["integrator"]["snapshot_times"] = {1.0}; })), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("ground scenario has zero diagnostics") {
  const auto res = run_scenario(parse_config(base_config("ground", "")));
  const auto& s = res.summary;
  CHECK(s.at("energy_initial").get<double>() == 0.0);
  CHECK(s.at("max_energy_drift").get<double>() == 0.0);
  CHECK(s.at("max_lagcoord3_residual").get<double>() == 0.0);
  CHECK(s.at("final_max_abs_U").get<double>() == 0.0);
  CHECK(s.at("max_y_decrease").get<double>() == 0.0);
  for (const auto& r : res.trajectory.diagnostics) {
    CHECK(r.energy == 0.0);
    CHECK(r.max_abs_U == 0.0);
  }
}

TEST_CASE("outputs are byte-identical between runs") {
  auto cfg = base_config("single_peakon", "determinism_a");
  cfg["scenario_params"] = {{"c", 1.0}, {"x0", -2.0}};
  run_scenario(parse_config(cfg));
  cfg["output_dir"] = "determinism_b";
  run_scenario(parse_config(cfg));
  const auto a = resolve_output_dir("determinism_a");
  const auto b = resolve_output_dir("determinism_b");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    const auto name = e.path().filename();
    if (name == "timing.json") continue;
    ++files;
    CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name.string());
  }
  CHECK(files >= 5);
  CHECK(std::filesystem::exists(a / "summary.json"));
  CHECK(std::filesystem::exists(a / "diagnostics.txt"));
  CHECK(std::filesystem::exists(a / "snapshot_000_lagrangian.txt"));
}

TEST_CASE("random scenario depends on the seed only") {
  auto cfg = base_config("random", "");
  const auto a = initial_data(parse_config(cfg)).lagrangian;
  const auto b = initial_data(parse_config(cfg)).lagrangian;
  CHECK(sup_diff_all(a, b) == 0.0);
  cfg["seed"] = 8;
  CHECK(sup_diff_all(a, initial_data(parse_config(cfg)).lagrangian) > 0.0);
}

TEST_CASE("identical metric pair") {
  auto cfg = base_config("single_peakon", "");
  cfg["scenario_params"] = {{"c", 1.0}, {"x0", 0.0}};
  cfg["perturbed_params"] = cfg["scenario_params"];
  cfg["metric"] = {{"M", 10.0}, {"chain_length", 2}};
  const auto rep = run_metric_study(parse_config(cfg));
  CHECK(rep.at("flagged").get<bool>() == false);
  REQUIRE(rep.at("rows").size() == 3);
  for (const auto& r : rep.at("rows")) {
    CHECK(r.at("lower").get<double>() == 0.0);
    CHECK(r.at("upper").get<double>() == 0.0);
  }
}

TEST_CASE("crest alignment") {
  CHECK(peakon_crest_label(1.0, 0.0) == 1.0);
  CHECK(peakon_crest_label(2.0, -1.0) == 3.0);
  auto cfg = base_config("single_peakon", "");
  cfg["scenario_params"] = {{"c", 1.0}, {"x0", 0.0}};
  cfg["grid"]["align"] = "node";
  const auto X = initial_data(parse_config(cfg)).lagrangian;
  bool hit = false;
  for (std::size_t i = 0; i < X.size(); ++i) hit = hit || std::abs(X.grid->node(i) - 1.0) < 1e-12;
  CHECK(hit);
}

TEST_CASE("small convergence sweep") {
  auto cfg = base_config("single_peakon", "");
  cfg["grid"] = {{"xi_min", -15.0}, {"xi_max", 17.0}, {"n", 321}, {"align", "cell"}};
  cfg["spatial_grid"] = {{"xi_min", -15.0}, {"xi_max", 15.0}, {"n", 1201}};
  cfg["integrator"] = {{"dt", 0.05}, {"t_end", 1.0}};
  cfg["scenario_params"] = {{"c", 1.0}, {"x0", 0.0}};
  cfg["convergence"] = {{"levels", 3}};
  const auto rep = run_convergence(parse_config(cfg));
  REQUIRE(rep.at("levels").size() == 3);
  REQUIRE(rep.at("ratios").size() == 2);
  const auto& rows = rep.at("levels");
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k].at("error").get<double>() < rows[k - 1].at("error").get<double>());
}
