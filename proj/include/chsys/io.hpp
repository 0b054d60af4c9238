#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chsys/dynamics.hpp"
#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"
#include "chsys/metric.hpp"

// Columnar text format: a "# " line holding a JSON header, a line of column names, then one
// row per node. Numbers use the shortest representation that reads back to the same double.
namespace chsys::io {

using json = nlohmann::json;

/// Shortest round-trip decimal form of x.
std::string format_double(double x);
/// Throws StructuralError on anything but a complete decimal number.
double parse_double(std::string_view s);

json grid_json(const Grid& g);
GridPtr grid_from_json(const json& j);

/// Columns xi y U H r yxi Uxi hxi. `extra` is merged into the header.
void write_lagrangian(std::ostream& os, const LagrangianState& X, const json& extra = json::object());
LagrangianState read_lagrangian(std::istream& is);

/// Columns x u rho density; atoms go into the header.
void write_eulerian(std::ostream& os, const EulerianState& z, const json& extra = json::object());
EulerianState read_eulerian(std::istream& is);

using AnyState = std::variant<LagrangianState, EulerianState>;

void save(const std::filesystem::path& path, const LagrangianState& X, const json& extra = json::object());
void save(const std::filesystem::path& path, const EulerianState& z, const json& extra = json::object());
/// Dispatches on the "kind" field of the header.
AnyState load(const std::filesystem::path& path);

/// Columns t energy lagcoord3 min_yxi max_abs_U max_y_decrease.
void write_diagnostics(std::ostream& os, const std::vector<DiagnosticsRow>& rows);

json relabeling_json(const Relabeling& f);
json metric_json(const MetricEstimate& e);

}  // namespace chsys::io
