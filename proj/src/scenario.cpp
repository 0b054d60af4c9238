#include "chsys/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>

#include "chsys/errors.hpp"
#include "chsys/io.hpp"
#include "chsys/metric.hpp"
#include "chsys/oracles.hpp"
#include "chsys/transforms.hpp"

namespace chsys {

using nlohmann::json;

namespace {

const std::vector<std::string> kScenarios = {"ground", "single_peakon", "peakon_antipeakon", "collision",
                                              "smoothing", "random"};

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: field '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("config: missing field '" + where + key + "'");
  return get_or<T>(j, key, T{});
}

GridPtr parse_grid(const json& g, const std::string& where) {
  const auto lo = get_required<double>(g, "xi_min", where);
  const auto hi = get_required<double>(g, "xi_max", where);
  const auto n = get_required<std::size_t>(g, "n", where);
  if (!(hi > lo) || n < 3) throw ConfigError("config: " + where.substr(0, where.size() - 1) + " needs xi_max > xi_min and n >= 3");
  return Grid::make(lo, hi, n);
}

json merge(json base, const json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) base[it.key()] = it.value();
  return base;
}

double param(const json& p, const char* key, double fallback) { return get_or<double>(p, key, fallback); }

// Move the grid so crest labels sit at nodes or cell midpoints. One label: shift by less than a
// cell. Two labels: also stretch dxi slightly so that their distance is a whole number of cells.
GridPtr aligned_grid(const GridPtr& g, const std::string& align, const std::vector<double>& labels) {
  if (align == "none" || labels.empty()) return g;
  if (align != "node" && align != "cell") throw ConfigError("config: grid.align must be none, node or cell");
  double h = g->dxi();
  const auto n = g->size();
  if (labels.size() >= 2) {
    const double span = labels.back() - labels.front();
    h = span / std::max(1.0, std::round(span / h));
  }
  const double label = labels.front();
  const double pos = (label - g->xi_min()) / h;
  if (pos < 1.0 || pos > static_cast<double>(n) - 2.0) throw ConfigError("config: crest label outside the grid");
  if (align == "node") return Grid::anchored(label, static_cast<std::size_t>(std::lround(pos)), h, n);
  return Grid::cell_centered(label, static_cast<std::size_t>(std::floor(pos)), h, n);
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw StructuralError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

std::string snapshot_name(std::size_t k, const char* kind) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%03zu_%s.txt", k, kind);
  return buf;
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ScenarioConfig c;
  c.raw = j;
  c.scenario = get_required<std::string>(j, "scenario", "");
  if (std::find(kScenarios.begin(), kScenarios.end(), c.scenario) == kScenarios.end())
    throw ConfigError("config: unknown scenario '" + c.scenario + "'");
  if (!j.contains("grid")) throw ConfigError("config: missing field 'grid'");
  c.grid = parse_grid(j.at("grid"), "grid.");
  c.align = get_or<std::string>(j.at("grid"), "align", "none");
  c.spatial_grid = j.contains("spatial_grid") ? parse_grid(j.at("spatial_grid"), "spatial_grid.")
                                              : Grid::make(c.grid->xi_min(), c.grid->xi_max(), c.grid->size());

  const json integ = j.value("integrator", json::object());
  auto& I = c.integrator;
  I.dt = get_or<double>(integ, "dt", 0.5 * c.grid->dxi());
  I.t_end = get_or<double>(integ, "t_end", 1.0);
  I.snapshot_times = get_or<std::vector<double>>(integ, "snapshot_times", {});
  I.drift_budget = get_or<double>(integ, "drift_budget", I.drift_budget);
  I.clip_tol = get_or<double>(integ, "clip_tol", I.clip_tol);
  // truncating a nondecaying density leaks energy through the boundary
  I.energy_budget = get_or<double>(integ, "energy_budget", c.scenario == "smoothing" ? -1.0 : I.energy_budget);
  I.stability_factor = get_or<double>(integ, "stability_factor", I.stability_factor);
  if (!(I.dt > 0.0)) throw ConfigError("config: integrator.dt must be positive");
  if (!(I.t_end >= 0.0)) throw ConfigError("config: integrator.t_end must be nonnegative");
  if (I.dt > I.stability_factor * c.grid->dxi() * (1.0 + 1e-12))
    throw ConfigError("config: integrator.dt exceeds stability_factor * dxi");
  for (double t : I.snapshot_times)
    if (t < 0.0 || t > I.t_end) throw ConfigError("config: snapshot time outside [0, t_end]");

  c.params = j.value("scenario_params", json::object());
  c.perturbed_params = j.value("perturbed_params", json::object());
  if (!c.params.is_object() || !c.perturbed_params.is_object())
    throw ConfigError("config: scenario_params must be an object");
  const json metric = j.value("metric", json::object());
  c.M = get_or<double>(metric, "M", c.M);
  c.chain_length = get_or<std::size_t>(metric, "chain_length", c.chain_length);
  c.ratio_cap = get_or<double>(metric, "ratio_cap", c.ratio_cap);
  c.levels = get_or<std::size_t>(j.value("convergence", json::object()), "levels", c.levels);
  if (c.levels < 2) throw ConfigError("config: convergence.levels must be at least 2");
  c.output_dir = get_or<std::string>(j, "output_dir", "");
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  try {
    return parse_config(json::parse(is));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& dir) {
  const char* root = std::getenv("CHSYS_OUTPUT_ROOT");
  if (root && *root && dir.is_relative()) return std::filesystem::path(root) / dir;
  return dir;
}

double peakon_crest_label(double c, double x0) { return x0 + c * c; }

InitialData initial_data(const ScenarioConfig& cfg, const json& overrides) {
  const json p = merge(cfg.params, overrides);
  InitialData d;
  GridPtr grid = cfg.grid;
  if (cfg.scenario == "ground") {
    d.eulerian = EulerianState::zero(cfg.spatial_grid);
  } else if (cfg.scenario == "single_peakon") {
    const double c = param(p, "c", 1.0), x0 = param(p, "x0", 0.0);
    if (c == 0.0) throw ConfigError("config: single_peakon needs c != 0");
    d.eulerian = oracles::single_peakon(c, x0, cfg.spatial_grid);
    grid = aligned_grid(grid, cfg.align, {peakon_crest_label(c, x0)});
  } else if (cfg.scenario == "peakon_antipeakon" || cfg.scenario == "smoothing") {
    const double rho = param(p, "rho", cfg.scenario == "smoothing" ? 0.5 : 0.0);
    const double a = param(p, "a", 5.0);
    d.eulerian = oracles::peakon_antipeakon(param(p, "c", 1.0), a, cfg.spatial_grid, rho);
    const CumulativeEnergy cum(d.eulerian->mu);
    grid = aligned_grid(grid, cfg.align, {-a + cum(-a), a + cum(a)});
  } else if (cfg.scenario == "collision") {
    const double E = param(p, "E", 1.0);
    if (E < 0.0) throw ConfigError("config: collision needs E >= 0");
    d.eulerian = oracles::collision_state(E, cfg.spatial_grid);
  } else if (cfg.scenario == "random") {
    std::mt19937_64 rng(get_or<std::uint64_t>(p, "seed", cfg.seed));
    d.lagrangian = oracles::random_F0_state(grid, rng, param(p, "amplitude", 0.5));
    return d;
  }
  try {
    d.lagrangian = to_lagrangian(*d.eulerian, grid);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return d;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto data = initial_data(cfg);
  const auto out = cfg.output_dir.empty() ? std::filesystem::path() : resolve_output_dir(cfg.output_dir);
  if (!out.empty()) std::filesystem::create_directories(out);

  ScenarioResult res;
  json snaps = json::array();
  std::vector<DiagnosticsRow> rows;
  double min_max_u = std::numeric_limits<double>::infinity(), t_min_max_u = 0.0;
  EvolveObserver obs;
  obs.on_step = [&](const DiagnosticsRow& row) {
    rows.push_back(row);
    if (row.max_abs_U < min_max_u) {
      min_max_u = row.max_abs_U;
      t_min_max_u = row.t;
    }
  };
  obs.on_snapshot = [&](double t, const LagrangianState& X) {
    const auto k = snaps.size();
    json snap = {{"t", t}, {"energy", X.H.back() - X.H.front()}, {"max_y_decrease", max_y_decrease(X)}};
    if (!out.empty()) io::save(out / snapshot_name(k, "lagrangian"), X, {{"t", t}, {"scenario", cfg.scenario}});
    try {
      const auto conv = to_eulerian_detailed(project_F0(X), cfg.spatial_grid);
      json atoms = json::array();
      for (const auto& a : conv.state.mu.atoms) atoms.push_back({a.location, a.mass});
      snap["eulerian_total_energy"] = total_energy(conv.state.mu);
      snap["atoms"] = atoms;
      snap["plateau_runs"] = conv.plateau_runs;
      snap["plateau_eps"] = conv.plateau_eps;
      snap["rho_flagged_nodes"] = conv.rho_flagged_nodes;
      if (!out.empty())
        io::save(out / snapshot_name(k, "eulerian"), conv.state,
                 {{"t", t}, {"scenario", cfg.scenario}, {"plateau_eps", conv.plateau_eps}});
      res.eulerian_snapshots.push_back(conv.state);
    } catch (const Error& e) {
      // characteristics crossed beyond what M accepts; the Lagrangian snapshot is still written
      snap["eulerian_error"] = e.what();
      res.eulerian_snapshots.push_back(EulerianState::zero(cfg.spatial_grid));
    }
    snaps.push_back(snap);
  };

  auto summarize = [&](const std::vector<DiagnosticsRow>& rows) {
    json s = {{"scenario", cfg.scenario}, {"seed", cfg.seed}, {"n", data.lagrangian.size()},
              {"dxi", data.lagrangian.grid->dxi()}, {"dt", cfg.integrator.dt}, {"t_end", cfg.integrator.t_end}};
    const double e0 = rows.empty() ? 0.0 : rows.front().energy;
    double drift = 0.0, lag3 = 0.0, min_yxi = std::numeric_limits<double>::infinity(), crossing = 0.0;
    for (const auto& r : rows) {
      crossing = std::max(crossing, r.max_y_decrease);
      drift = std::max(drift, std::abs(r.energy - e0));
      lag3 = std::max(lag3, r.lagcoord3);
      min_yxi = std::min(min_yxi, r.min_yxi);
    }
    s["energy_initial"] = e0;
    s["energy_final"] = rows.empty() ? 0.0 : rows.back().energy;
    s["max_energy_drift"] = drift;
    s["max_energy_drift_relative"] = e0 > 0.0 ? drift / e0 : drift;
    s["max_lagcoord3_residual"] = lag3;
    s["lagcoord3_growth"] = rows.empty() ? 0.0 : lag3 - rows.front().lagcoord3;
    s["min_yxi"] = rows.empty() ? 0.0 : min_yxi;
    s["min_max_abs_U"] = rows.empty() ? 0.0 : min_max_u;
    s["t_min_max_abs_U"] = t_min_max_u;
    s["final_max_abs_U"] = rows.empty() ? 0.0 : rows.back().max_abs_U;
    s["max_y_decrease"] = crossing;
    s["steps"] = rows.empty() ? 0 : rows.size() - 1;
    s["snapshots"] = snaps;
    return s;
  };
  auto finish = [&](const std::vector<DiagnosticsRow>& rows, const json& summary) {
    res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.empty()) return;
    std::ofstream diag(out / "diagnostics.txt");
    io::write_diagnostics(diag, rows);
    write_json(out / "summary.json", summary);
    // kept apart so the other outputs stay byte-identical between runs
    write_json(out / "timing.json", {{"runtime_seconds", res.runtime_seconds}});
  };

  try {
    res.trajectory = evolve(data.lagrangian, cfg.integrator, obs);
  } catch (const IntegrationError& e) {
    auto s = summarize(rows);
    s["status"] = "integration_error";
    s["message"] = e.what();
    s["failure_time"] = e.time();
    finish(rows, s);
    throw;
  }
  res.summary = summarize(rows);
  res.summary["status"] = "ok";
  finish(rows, res.summary);
  return res;
}

json run_metric_study(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto da = initial_data(cfg);
  const auto db = initial_data(cfg, cfg.perturbed_params);
  if (!same_grid(da.lagrangian.grid, db.lagrangian.grid))
    throw ConfigError("config: perturbed state lands on a different Lagrangian grid (use grid.align = none)");

  auto cfg_int = cfg.integrator;
  if (cfg_int.snapshot_times.empty()) cfg_int.snapshot_times = {0.0, cfg_int.t_end};
  const auto ta = evolve(da.lagrangian, cfg_int);
  const auto tb = evolve(db.lagrangian, cfg_int);

  json rows = json::array();
  double lower0 = 0.0;
  bool flagged = false;
  const auto d0 = dM_estimate(project_F0(da.lagrangian), project_F0(db.lagrangian), cfg.M, cfg.chain_length);
  lower0 = d0.lower;
  for (std::size_t k = 0; k < ta.times.size(); ++k) {
    // near a collision, crossings left by the discretization must go before projecting
    double ra = 0.0, rb = 0.0;
    const auto xa = project_F0(monotone_envelope(ta.snapshots[k], &ra));
    const auto xb = project_F0(monotone_envelope(tb.snapshots[k], &rb));
    const auto est = dM_estimate(xa, xb, cfg.M, cfg.chain_length);
    double ratio;
    if (lower0 > 0.0) ratio = est.upper / lower0;
    else ratio = est.upper == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const bool bad = !std::isfinite(ratio) || ratio > cfg.ratio_cap;
    flagged = flagged || bad;
    rows.push_back({{"t", ta.times[k]},
                    {"lower", est.lower},
                    {"upper", est.upper},
                    {"chain_length", est.chain_length},
                    {"monotonicity_repair", std::max(ra, rb)},
                    {"ratio", std::isfinite(ratio) ? json(ratio) : json(nullptr)},
                    {"flagged", bad}});
  }
  json report = {{"scenario", cfg.scenario},
                 {"M", cfg.M},
                 {"ratio_cap", cfg.ratio_cap},
                 {"initial", io::metric_json(d0)},
                 {"lower0", lower0},
                 {"rows", rows},
                 {"flagged", flagged}};
  if (!cfg.output_dir.empty()) {
    const auto out = resolve_output_dir(cfg.output_dir);
    std::filesystem::create_directories(out);
    write_json(out / "metric_report.json", report);
    write_json(out / "timing.json",
               {{"runtime_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}});
  }
  return report;
}

json run_convergence(const ScenarioConfig& cfg) {
  if (cfg.scenario != "single_peakon") throw ConfigError("config: convergence studies use the single_peakon scenario");
  const auto start = std::chrono::steady_clock::now();
  const double c = param(cfg.params, "c", 1.0), x0 = param(cfg.params, "x0", 0.0);
  const double T = cfg.integrator.t_end;
  json levels = json::array(), ratios = json::array();
  double prev = 0.0;
  for (std::size_t k = 0; k < cfg.levels; ++k) {
    const std::size_t scale = std::size_t{1} << k;
    ScenarioConfig lc = cfg;
    lc.grid = Grid::make(cfg.grid->xi_min(), cfg.grid->xi_max(), (cfg.grid->size() - 1) * scale + 1);
    // the initial data are sampled on the spatial grid, so it is refined as well
    lc.spatial_grid = Grid::make(cfg.spatial_grid->xi_min(), cfg.spatial_grid->xi_max(),
                                 (cfg.spatial_grid->size() - 1) * scale + 1);
    lc.integrator.dt = cfg.integrator.dt / static_cast<double>(scale);
    lc.integrator.snapshot_times.clear();
    const auto data = initial_data(lc);
    const auto traj = evolve(data.lagrangian, lc.integrator);
    const auto& X = traj.final_state;
    double err = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
      err = std::max(err, std::abs(X.U[i] - oracles::peakon_value(c, x0, T, X.y[i])));
    levels.push_back({{"n", X.size()}, {"dxi", X.grid->dxi()}, {"dt", lc.integrator.dt}, {"error", err}});
    if (k > 0) ratios.push_back(err > 0.0 ? prev / err : 0.0);
    prev = err;
  }
  json report = {{"scenario", cfg.scenario}, {"t_end", T}, {"levels", levels}, {"ratios", ratios}};
  if (!cfg.output_dir.empty()) {
    const auto out = resolve_output_dir(cfg.output_dir);
    std::filesystem::create_directories(out);
    write_json(out / "convergence.json", report);
    write_json(out / "timing.json",
               {{"runtime_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}});
  }
  return report;
}

}  // namespace chsys
