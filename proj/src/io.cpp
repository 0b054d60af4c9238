#include "chsys/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "chsys/errors.hpp"

namespace chsys::io {

namespace {

const std::vector<std::string> kLagrangianColumns = {"xi", "y", "U", "H", "r", "yxi", "Uxi", "hxi"};
const std::vector<std::string> kEulerianColumns = {"x", "u", "rho", "density"};

json read_header(std::istream& is, const std::vector<std::string>& columns) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw StructuralError("state file: missing header line");
  json header;
  try {
    header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw StructuralError(std::string("state file: bad header: ") + e.what());
  }
  if (!std::getline(is, line)) throw StructuralError("state file: missing column line");
  std::istringstream names(line);
  std::vector<std::string> got;
  for (std::string s; names >> s;) got.push_back(s);
  if (got != columns) throw StructuralError("state file: unexpected columns '" + line + "'");
  return header;
}

std::vector<std::vector<double>> read_rows(std::istream& is, std::size_t ncols, std::size_t nrows) {
  std::vector<std::vector<double>> cols(ncols);
  for (auto& c : cols) c.reserve(nrows);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0, k = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      const auto end = std::min(line.find(' ', pos), line.size());
      if (k >= ncols) throw StructuralError("state file: too many columns in a row");
      cols[k++].push_back(parse_double(std::string_view(line).substr(pos, end - pos)));
      pos = end;
    }
    if (k != ncols) throw StructuralError("state file: too few columns in a row");
  }
  if (cols.front().size() != nrows)
    throw StructuralError("state file: expected " + std::to_string(nrows) + " rows, found " +
                          std::to_string(cols.front().size()));
  return cols;
}

void write_rows(std::ostream& os, const std::vector<const std::vector<double>*>& cols) {
  const auto n = cols.front()->size();
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    line.clear();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k) line += ' ';
      line += format_double((*cols[k])[i]);
    }
    line += '\n';
    os << line;
  }
}

json merged(json header, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it)
    if (!header.contains(it.key())) header[it.key()] = it.value();
  return header;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw StructuralError("not a number: '" + std::string(s) + "'");
  return v;
}

json grid_json(const Grid& g) { return {{"xi_min", g.xi_min()}, {"xi_max", g.xi_max()}, {"n", g.size()}}; }

GridPtr grid_from_json(const json& j) {
  try {
    return Grid::make(j.at("xi_min").get<double>(), j.at("xi_max").get<double>(), j.at("n").get<std::size_t>());
  } catch (const json::exception& e) {
    throw StructuralError(std::string("bad grid description: ") + e.what());
  }
}

void write_lagrangian(std::ostream& os, const LagrangianState& X, const json& extra) {
  X.validate_shape();
  const json header = merged({{"kind", "lagrangian"}, {"grid", grid_json(*X.grid)}}, extra);
  os << "# " << header.dump() << '\n';
  for (std::size_t k = 0; k < kLagrangianColumns.size(); ++k) os << (k ? " " : "") << kLagrangianColumns[k];
  os << '\n';
  const std::vector<double> xi(X.grid->nodes().begin(), X.grid->nodes().end());
  write_rows(os, {&xi, &X.y, &X.U, &X.H, &X.r, &X.yxi, &X.Uxi, &X.hxi});
}

LagrangianState read_lagrangian(std::istream& is) {
  const auto header = read_header(is, kLagrangianColumns);
  if (header.value("kind", "") != "lagrangian") throw StructuralError("state file: not a Lagrangian state");
  const auto grid = grid_from_json(header.at("grid"));
  auto cols = read_rows(is, kLagrangianColumns.size(), grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (cols[0][i] != grid->node(i)) throw StructuralError("state file: xi column does not match the grid");
  LagrangianState X;
  X.grid = grid;
  X.y = std::move(cols[1]);
  X.U = std::move(cols[2]);
  X.H = std::move(cols[3]);
  X.r = std::move(cols[4]);
  X.yxi = std::move(cols[5]);
  X.Uxi = std::move(cols[6]);
  X.hxi = std::move(cols[7]);
  return X;
}

void write_eulerian(std::ostream& os, const EulerianState& z, const json& extra) {
  z.validate_shape();
  json atoms = json::array();
  for (const auto& a : z.mu.atoms) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
  const json header = merged({{"kind", "eulerian"}, {"grid", grid_json(*z.grid)}, {"atoms", atoms}}, extra);
  os << "# " << header.dump() << '\n';
  for (std::size_t k = 0; k < kEulerianColumns.size(); ++k) os << (k ? " " : "") << kEulerianColumns[k];
  os << '\n';
  const std::vector<double> x(z.grid->nodes().begin(), z.grid->nodes().end());
  write_rows(os, {&x, &z.u, &z.rho, &z.mu.density});
}

EulerianState read_eulerian(std::istream& is) {
  const auto header = read_header(is, kEulerianColumns);
  if (header.value("kind", "") != "eulerian") throw StructuralError("state file: not an Eulerian state");
  const auto grid = grid_from_json(header.at("grid"));
  auto cols = read_rows(is, kEulerianColumns.size(), grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (cols[0][i] != grid->node(i)) throw StructuralError("state file: x column does not match the grid");
  auto z = EulerianState::zero(grid);
  z.u = std::move(cols[1]);
  z.rho = std::move(cols[2]);
  z.mu.density = std::move(cols[3]);
  try {
    for (const auto& a : header.value("atoms", json::array()))
      z.mu.atoms.push_back({a.at("location").get<double>(), a.at("mass").get<double>()});
  } catch (const json::exception& e) {
    throw StructuralError(std::string("state file: bad atom list: ") + e.what());
  }
  return z;
}

namespace {
template <class State, class Writer>
void save_with(const std::filesystem::path& path, const State& s, const json& extra, Writer write) {
  std::ofstream os(path);
  if (!os) throw StructuralError("cannot open " + path.string() + " for writing");
  write(os, s, extra);
  if (!os) throw StructuralError("failed writing " + path.string());
}
}  // namespace

void save(const std::filesystem::path& path, const LagrangianState& X, const json& extra) {
  save_with(path, X, extra, write_lagrangian);
}

void save(const std::filesystem::path& path, const EulerianState& z, const json& extra) {
  save_with(path, z, extra, write_eulerian);
}

AnyState load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw StructuralError("cannot open " + path.string());
  std::string first;
  std::getline(is, first);
  if (first.rfind("# ", 0) != 0) throw StructuralError(path.string() + ": missing header line");
  std::string kind;
  try {
    kind = json::parse(first.substr(2)).value("kind", "");
  } catch (const json::exception& e) {
    throw StructuralError(path.string() + ": bad header: " + e.what());
  }
  is.clear();
  is.seekg(0);
  if (kind == "lagrangian") return read_lagrangian(is);
  if (kind == "eulerian") return read_eulerian(is);
  throw StructuralError(path.string() + ": unknown state kind '" + kind + "'");
}

void write_diagnostics(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << "t energy lagcoord3 min_yxi max_abs_U max_y_decrease\n";
  std::string line;
  for (const auto& r : rows) {
    line = format_double(r.t);
    for (double v : {r.energy, r.lagcoord3, r.min_yxi, r.max_abs_U, r.max_y_decrease}) {
      line += ' ';
      line += format_double(v);
    }
    line += '\n';
    os << line;
  }
}

json relabeling_json(const Relabeling& f) {
  return {{"grid", grid_json(*f.grid())}, {"knots", std::vector<double>(f.values().begin(), f.values().end())}};
}

json metric_json(const MetricEstimate& e) {
  json j = {{"lower", e.lower}, {"upper", e.upper}, {"chain_length", e.chain_length}};
  if (e.witness_f1) j["witness_f1"] = relabeling_json(*e.witness_f1);
  if (e.witness_f2) j["witness_f2"] = relabeling_json(*e.witness_f2);
  json chain = json::array();
  for (const auto& X : e.chain)
    chain.push_back({{"norm_E", norm_E(X)}, {"h_sup", sup_norm(X.H)}, {"lagcoord3", lagcoord3_residual(X)}});
  j["chain"] = chain;
  return j;
}

}  // namespace chsys::io
