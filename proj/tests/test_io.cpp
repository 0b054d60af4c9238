#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "chsys/errors.hpp"
#include "chsys/io.hpp"
#include "chsys/oracles.hpp"
#include "chsys/scenario.hpp"

using namespace chsys;

TEST_CASE("doubles round-trip") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng) * std::pow(10.0, (t % 40) - 20);
    CHECK(io::parse_double(io::format_double(x)) == x);
  }
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::parse_double("1e-3") == 1e-3);
  CHECK_THROWS_AS(io::parse_double("1.5x"), StructuralError);
  CHECK_THROWS_AS(io::parse_double(""), StructuralError);
  CHECK_THROWS_AS(io::parse_double("abc"), StructuralError);
}

TEST_CASE("grid json") {
  const auto g = Grid::make(-3.0, 2.0, 51);
  const auto back = io::grid_from_json(io::grid_json(*g));
  CHECK(back->size() == 51);
  CHECK(back->xi_min() == -3.0);
  CHECK(back->xi_max() == 2.0);
  CHECK_THROWS_AS(io::grid_from_json(io::json::object()), StructuralError);
}

TEST_CASE("Lagrangian state round-trip") {
  std::mt19937_64 rng(2);
  const auto X = oracles::random_F_state(Grid::make(-5.0, 5.0, 301), rng);
  std::stringstream ss;
  io::write_lagrangian(ss, X, {{"t", 1.5}});
  const auto Y = io::read_lagrangian(ss);
  CHECK(Y.grid->size() == X.size());
  CHECK(sup_diff_all(X, Y) == 0.0);
  CHECK(Y.grid->dxi() == X.grid->dxi());
}

TEST_CASE("Eulerian state round-trip") {
  auto z = oracles::single_peakon(1.0, 0.5, Grid::make(-5.0, 5.0, 201));
  z.mu.atoms = {{-1.0, 0.25}, {2.0, 1.5}};
  std::stringstream ss;
  io::write_eulerian(ss, z);
  const auto w = io::read_eulerian(ss);
  CHECK(sup_diff(z.u, w.u) == 0.0);
  CHECK(sup_diff(z.rho, w.rho) == 0.0);
  CHECK(sup_diff(z.mu.density, w.mu.density) == 0.0);
  REQUIRE(w.mu.atoms.size() == 2);
  CHECK(w.mu.atoms[1].location == 2.0);
  CHECK(w.mu.atoms[1].mass == 1.5);
}

TEST_CASE("malformed state files") {
  std::mt19937_64 rng(3);
  const auto X = oracles::random_F_state(Grid::make(-5.0, 5.0, 21), rng);
  std::stringstream ss;
  io::write_lagrangian(ss, X);
  const std::string good = ss.str();

  auto read = [](const std::string& s) {
    std::istringstream is(s);
    return io::read_lagrangian(is);
  };
  CHECK_THROWS_AS(read(""), StructuralError);
  CHECK_THROWS_AS(read("# not json\n"), StructuralError);
  // drop the last row
  CHECK_THROWS_AS(read(good.substr(0, good.rfind('\n', good.size() - 2) + 1)), StructuralError);
  // damage a number
  auto bad = good;
  bad[bad.rfind('.')] = 'x';
  CHECK_THROWS_AS(read(bad), StructuralError);
  // an Eulerian file is not a Lagrangian one
  std::stringstream e;
  io::write_eulerian(e, EulerianState::zero(Grid::make(0.0, 1.0, 3)));
  CHECK_THROWS_AS(read(e.str()), StructuralError);
}

TEST_CASE("save and load") {
  const auto dir = resolve_output_dir("io_test");
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(4);
  const auto X = oracles::random_F_state(Grid::make(-5.0, 5.0, 101), rng);
  io::save(dir / "lag.txt", X);
  io::save(dir / "eul.txt", oracles::collision_state(1.0, Grid::make(-2.0, 2.0, 41)));
  const auto a = io::load(dir / "lag.txt");
  REQUIRE(std::holds_alternative<LagrangianState>(a));
  CHECK(sup_diff_all(std::get<LagrangianState>(a), X) == 0.0);
  const auto b = io::load(dir / "eul.txt");
  REQUIRE(std::holds_alternative<EulerianState>(b));
  CHECK(std::get<EulerianState>(b).mu.atoms.size() == 1);
  CHECK_THROWS(io::load(dir / "missing.txt"));
}

TEST_CASE("metric json") {
  MetricEstimate e;
  e.lower = 0.25;
  e.upper = 1.0;
  e.witness_f1 = Relabeling::identity(Grid::make(0.0, 1.0, 5));
  const auto j = io::metric_json(e);
  CHECK(j.at("lower").get<double>() == 0.25);
  CHECK(j.at("upper").get<double>() == 1.0);
  CHECK(j.dump().find("NaN") == std::string::npos);
}
