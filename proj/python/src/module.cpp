#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "chsys/dynamics.hpp"
#include "chsys/errors.hpp"
#include "chsys/io.hpp"
#include "chsys/metric.hpp"
#include "chsys/oracles.hpp"
#include "chsys/scenario.hpp"
#include "chsys/transforms.hpp"

namespace py = pybind11;
using namespace chsys;

// Grids are shared as pointers to const; Python holds them through the mutable holder.
namespace pybind11::detail {
template <>
struct type_caster<GridPtr> {
  using Mutable = std::shared_ptr<Grid>;
  PYBIND11_TYPE_CASTER(GridPtr, const_name("Grid"));

  bool load(handle src, bool convert) {
    make_caster<Mutable> base;
    if (!base.load(src, convert)) return false;
    value = cast_op<Mutable>(base);
    return true;
  }
  static handle cast(const GridPtr& src, return_value_policy policy, handle parent) {
    return make_caster<Mutable>::cast(std::const_pointer_cast<Grid>(src), policy, parent);
  }
};
}  // namespace pybind11::detail

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw StructuralError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

// numpy view of a vector member, copied in and out
template <class T>
void vector_field(py::class_<T>& cls, const char* name, std::vector<double> T::*member) {
  cls.def_property(
      name, [member](const T& s) { return to_array(s.*member); },
      [member](T& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
        s.*member = from_array(a);
      });
}

py::dict metric_dict(const MetricEstimate& e) {
  py::dict d;
  d["lower"] = e.lower;
  d["upper"] = e.upper;
  d["chain_length"] = e.chain_length;
  d["witness_f1"] = e.witness_f1 ? py::object(to_array(e.witness_f1->values())) : py::none();
  d["witness_f2"] = e.witness_f2 ? py::object(to_array(e.witness_f2->values())) : py::none();
  return d;
}

py::object parse_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_chsys, m) {
  m.doc() = "Conservative two-component Camassa-Holm solver in Lagrangian coordinates";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<StructuralError>(m, "StructuralError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ConstraintViolation>(m, "ConstraintViolation", base);
  py::register_exception<IntegrationError>(m, "IntegrationError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init([](double a, double b, std::size_t n) { return std::const_pointer_cast<Grid>(Grid::make(a, b, n)); }),
           py::arg("xi_min"),
           py::arg("xi_max"), py::arg("n"))
      .def_static("cell_centered", &Grid::cell_centered, py::arg("anchor"), py::arg("cell_index"), py::arg("h"),
                  py::arg("n"))
      .def_static("anchored", &Grid::anchored, py::arg("anchor"), py::arg("anchor_index"), py::arg("h"), py::arg("n"))
      .def_property_readonly("xi_min", &Grid::xi_min)
      .def_property_readonly("xi_max", &Grid::xi_max)
      .def_property_readonly("dxi", &Grid::dxi)
      .def_property_readonly("nodes", [](const Grid& g) { return to_array(g.nodes()); })
      .def("__len__", &Grid::size)
      .def("__repr__", [](const Grid& g) {
        return "Grid(" + num(g.xi_min()) + ", " + num(g.xi_max()) + ", " + std::to_string(g.size()) + ")";
      });

  py::class_<LagrangianState> lag(m, "LagrangianState");
  lag.def_static("ground", &LagrangianState::ground, py::arg("grid"))
      .def_readonly("grid", &LagrangianState::grid)
      .def("__len__", &LagrangianState::size)
      .def("copy", [](const LagrangianState& X) { return X; });
  vector_field(lag, "y", &LagrangianState::y);
  vector_field(lag, "U", &LagrangianState::U);
  vector_field(lag, "H", &LagrangianState::H);
  vector_field(lag, "r", &LagrangianState::r);
  vector_field(lag, "yxi", &LagrangianState::yxi);
  vector_field(lag, "Uxi", &LagrangianState::Uxi);
  vector_field(lag, "hxi", &LagrangianState::hxi);

  py::class_<EulerianState> eul(m, "EulerianState");
  eul.def_static("zero", &EulerianState::zero, py::arg("grid"))
      .def_readonly("grid", &EulerianState::grid)
      .def_property(
          "atoms",
          [](const EulerianState& z) {
            py::list out;
            for (const auto& a : z.mu.atoms) out.append(py::make_tuple(a.location, a.mass));
            return out;
          },
          [](EulerianState& z, const std::vector<std::pair<double, double>>& atoms) {
            z.mu.atoms.clear();
            for (const auto& [x, mass] : atoms) z.mu.atoms.push_back({x, mass});
          })
      .def_property(
          "density", [](const EulerianState& z) { return to_array(z.mu.density); },
          [](EulerianState& z, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            z.mu.density = from_array(a);
          })
      .def_property_readonly("total_energy", [](const EulerianState& z) { return total_energy(z.mu); });
  vector_field(eul, "u", &EulerianState::u);
  vector_field(eul, "rho", &EulerianState::rho);

  py::class_<Relabeling>(m, "Relabeling")
      .def_static("identity", &Relabeling::identity, py::arg("grid"))
      .def_static(
          "from_values",
          [](GridPtr g, const py::array_t<double, py::array::c_style | py::array::forcecast>& v) {
            return Relabeling::from_values(std::move(g), from_array(v));
          },
          py::arg("grid"), py::arg("values"))
      .def_property_readonly("values", [](const Relabeling& f) { return to_array(f.values()); })
      .def("kappa", &Relabeling::kappa)
      .def("inverse", &Relabeling::inverse)
      .def("compose", &Relabeling::compose)
      .def("__call__", &Relabeling::operator());

  py::class_<DiagnosticsRow>(m, "DiagnosticsRow")
      .def_readonly("t", &DiagnosticsRow::t)
      .def_readonly("energy", &DiagnosticsRow::energy)
      .def_readonly("lagcoord3", &DiagnosticsRow::lagcoord3)
      .def_readonly("min_yxi", &DiagnosticsRow::min_yxi)
      .def_readonly("max_abs_U", &DiagnosticsRow::max_abs_U)
      .def_readonly("max_y_decrease", &DiagnosticsRow::max_y_decrease);

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](double dt, double t_end, std::vector<double> snapshot_times, double drift_budget,
                       double energy_budget) {
             IntegratorConfig c;
             c.dt = dt;
             c.t_end = t_end;
             c.snapshot_times = std::move(snapshot_times);
             c.drift_budget = drift_budget;
             c.energy_budget = energy_budget;
             return c;
           }),
           py::arg("dt") = 0.01, py::arg("t_end") = 1.0, py::arg("snapshot_times") = std::vector<double>{},
           py::arg("drift_budget") = 1e-6, py::arg("energy_budget") = 1e-6)
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("t_end", &IntegratorConfig::t_end)
      .def_readwrite("snapshot_times", &IntegratorConfig::snapshot_times)
      .def_readwrite("drift_budget", &IntegratorConfig::drift_budget)
      .def_readwrite("energy_budget", &IntegratorConfig::energy_budget)
      .def_readwrite("clip_tol", &IntegratorConfig::clip_tol)
      .def_readwrite("stability_factor", &IntegratorConfig::stability_factor);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("diagnostics", &Trajectory::diagnostics)
      .def_readonly("final_state", &Trajectory::final_state);

  // transforms
  m.def("to_lagrangian", &to_lagrangian, py::arg("z"), py::arg("grid"), py::arg("coverage_tol") = 1e-9);
  m.def(
      "to_eulerian", [](const LagrangianState& X, GridPtr g) { return to_eulerian(X, std::move(g)); }, py::arg("X"),
      py::arg("spatial_grid"));
  m.def("project_F0", &project_F0, py::arg("X"));
  m.def("relabel", &relabel, py::arg("X"), py::arg("f"));

  // dynamics
  m.def(
      "compute_kernels",
      [](const LagrangianState& X) {
        const auto k = compute_kernels(X);
        return py::make_tuple(to_array(k.P), to_array(k.Q));
      },
      py::arg("X"));
  m.def("rhs", py::overload_cast<const LagrangianState&>(&rhs), py::arg("X"));
  m.def(
      "evolve",
      [](const LagrangianState& X, const IntegratorConfig& cfg) {
        py::gil_scoped_release release;
        return evolve(X, cfg);
      },
      py::arg("X"), py::arg("config"));
  m.def(
      "semigroup_T",
      [](const EulerianState& z, double t, const IntegratorConfig& cfg, GridPtr g) {
        py::gil_scoped_release release;
        return semigroup_T(z, t, cfg, std::move(g));
      },
      py::arg("z"), py::arg("t"), py::arg("config"), py::arg("lagrangian_grid"));
  m.def("diagnose", &diagnose, py::arg("t"), py::arg("X"));

  // norms and constraints
  m.def("norm_E", &norm_E);
  m.def("norm_E_diff", &norm_E_diff);
  m.def("norm_Linf_diff", &norm_Linf_diff);
  m.def("lagcoord3_residual", &lagcoord3_residual);
  m.def(
      "check_in_G",
      [](const LagrangianState& X, double tol) {
        const auto r = check_in_G(X, tol);
        py::dict d;
        d["in_G"] = r.in_G;
        d["in_F0"] = r.in_F0;
        d["max_lagcoord3_residual"] = r.max_lagcoord3_residual;
        d["f0_residual"] = r.f0_residual;
        d["h_sup"] = r.h_sup;
        d["norm_E"] = r.norm_E;
        return d;
      },
      py::arg("X"), py::arg("tol") = 1e-8);

  // metric
  m.def(
      "J_upper", [](const LagrangianState& a, const LagrangianState& b) { return metric_dict(J_upper(a, b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "dM_estimate",
      [](const LagrangianState& a, const LagrangianState& b, double M, std::size_t chain) {
        return metric_dict(dM_estimate(a, b, M, chain));
      },
      py::arg("a"), py::arg("b"), py::arg("M"), py::arg("chain_length") = 2);
  m.def(
      "d_DM",
      [](const EulerianState& a, const EulerianState& b, double M, GridPtr g, std::size_t chain) {
        return metric_dict(d_DM(a, b, M, std::move(g), chain));
      },
      py::arg("a"), py::arg("b"), py::arg("M"), py::arg("lagrangian_grid"), py::arg("chain_length") = 2);
  m.def(
      "r_separation", [](const LagrangianState& X) { return to_array(r_separation(X)); }, py::arg("X"));

  // reference solutions
  auto o = m.def_submodule("oracles", "Reference solutions");
  o.def("single_peakon", &oracles::single_peakon, py::arg("c"), py::arg("x0"), py::arg("grid"));
  o.def("peakon_antipeakon", &oracles::peakon_antipeakon, py::arg("c"), py::arg("a"), py::arg("grid"),
        py::arg("rho") = 0.0);
  o.def("collision_state", &oracles::collision_state, py::arg("E"), py::arg("grid"));
  o.def("heaviside_pair", &oracles::heaviside_pair, py::arg("grid"), py::arg("E") = 1.0);
  o.def("peakon_value", &oracles::peakon_value, py::arg("c"), py::arg("x0"), py::arg("t"), py::arg("x"));
  o.def("peakon_energy", &oracles::peakon_energy, py::arg("c"));
  o.def(
      "brute_force_kernels",
      [](const LagrangianState& X) {
        const auto k = oracles::brute_force_kernels(X);
        return py::make_tuple(to_array(k.P), to_array(k.Q));
      },
      py::arg("X"));
  o.def(
      "random_F_state",
      [](GridPtr g, std::uint64_t seed, double amplitude) {
        std::mt19937_64 rng(seed);
        return oracles::random_F_state(std::move(g), rng, amplitude);
      },
      py::arg("grid"), py::arg("seed"), py::arg("amplitude") = 0.5);
  o.def(
      "random_relabeling",
      [](GridPtr g, std::uint64_t seed, double kappa) {
        std::mt19937_64 rng(seed);
        return oracles::random_relabeling(std::move(g), rng, kappa);
      },
      py::arg("grid"), py::arg("seed"), py::arg("kappa"));

  // scenarios, configured with plain dicts
  m.def(
      "run_scenario",
      [](const py::object& cfg) {
        const auto c = parse_config(to_json(cfg));
        nlohmann::json summary;
        {
          py::gil_scoped_release release;
          summary = run_scenario(c).summary;
        }
        return parse_json(summary);
      },
      py::arg("config"));
  m.def(
      "run_metric_study",
      [](const py::object& cfg) {
        const auto c = parse_config(to_json(cfg));
        nlohmann::json rep;
        {
          py::gil_scoped_release release;
          rep = run_metric_study(c);
        }
        return parse_json(rep);
      },
      py::arg("config"));
  m.def(
      "run_convergence",
      [](const py::object& cfg) {
        const auto c = parse_config(to_json(cfg));
        nlohmann::json rep;
        {
          py::gil_scoped_release release;
          rep = run_convergence(c);
        }
        return parse_json(rep);
      },
      py::arg("config"));
}
