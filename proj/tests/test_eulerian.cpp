#include <doctest.h>

#include <cmath>

#include "chsys/errors.hpp"
#include "chsys/eulerian.hpp"
#include "chsys/oracles.hpp"

using namespace chsys;

namespace {
GridPtr grid() { return Grid::make(-2.0, 2.0, 401); }

EnergyMeasure delta0() {
  auto mu = EnergyMeasure::zero(grid());
  mu.atoms.push_back({0.0, 1.0});
  return mu;
}

EnergyMeasure unit_box() {
  auto mu = EnergyMeasure::zero(grid());
  for (std::size_t i = 0; i < mu.grid->size(); ++i) {
    const double x = mu.grid->node(i);
    mu.density[i] = (x >= -1e-12 && x <= 1.0 + 1e-12) ? 1.0 : 0.0;
  }
  return mu;
}
}  // namespace

TEST_CASE("zero state is in D") {
  const auto z = EulerianState::zero(grid());
  const auto r = check_in_D(z, 1e-12);
  CHECK(r.in_D);
  CHECK(r.total_energy == 0.0);
  CHECK(r.in_DM(0.0));
}

TEST_CASE("a unit atom with u = rho = 0 is in D") {
  auto z = EulerianState::zero(grid());
  z.mu = delta0();
  const auto r = check_in_D(z, 1e-12);
  CHECK(r.in_D);
  CHECK(r.total_energy == 1.0);
  CHECK(r.in_DM(1.0));
  CHECK_FALSE(r.in_DM(0.5));
}

TEST_CASE("a density with u = rho = 0 is not in D") {
  auto z = EulerianState::zero(grid());
  z.mu = unit_box();
  const auto r = check_in_D(z, 1e-8);
  CHECK_FALSE(r.in_D);
  CHECK(r.max_density_residual == doctest::Approx(1.0));
}

TEST_CASE("structural problems") {
  auto z = EulerianState::zero(grid());
  z.mu.density[3] = -1.0;
  CHECK_FALSE(check_in_D(z, 1e-8).structurally_valid);
  auto w = EulerianState::zero(grid());
  w.mu.atoms = {{0.5, 1.0}, {0.2, 1.0}};
  CHECK_FALSE(check_in_D(w, 1e-8).structurally_valid);
  auto v = EulerianState::zero(grid());
  v.mu.atoms = {{0.5, -1.0}};
  CHECK_FALSE(check_in_D(v, 1e-8).structurally_valid);
  auto s = EulerianState::zero(grid());
  s.u.pop_back();
  CHECK_THROWS_AS(s.validate_shape(), StructuralError);
}

TEST_CASE("cumulative energy uses the open interval") {
  const auto mu = delta0();
  CHECK(cumulative(mu, 0.0) == 0.0);
  CHECK(cumulative(mu, std::nextafter(0.0, 1.0)) == 1.0);
  CHECK(cumulative(mu, -1.0) == 0.0);
  // the piecewise-linear interpolant of the box ramps up over [-h, 0] and down over [1, 1 + h]
  const auto box = unit_box();
  const double h = box.grid->dxi();
  CHECK(cumulative(box, 0.5) == doctest::Approx(0.5 + 0.5 * h).epsilon(1e-12));
  CHECK(cumulative(box, 5.0) == doctest::Approx(1.0 + h).epsilon(1e-12));
  CumulativeEnergy cum(box);
  CHECK(cum(0.25) == doctest::Approx(0.25 + 0.5 * h).epsilon(1e-12));
  CHECK(cum.density_at(0.5) == 1.0);
  CHECK(cum.density_at(10.0) == 0.0);
  CHECK(cum.total() == doctest::Approx(1.0 + h).epsilon(1e-12));
}

TEST_CASE("peakon density check") {
  const auto z = oracles::single_peakon(1.0, 0.0, Grid::make(-10.0, 10.0, 2001));
  const auto r = check_in_D(z, 1e-3);
  CHECK(r.in_D);
  CHECK(r.max_density_residual < 1e-3);
}

TEST_CASE("total energy") {
  CHECK(total_energy(EnergyMeasure::zero(grid())) == 0.0);
  CHECK(total_energy(delta0()) == 1.0);
  CHECK(total_energy(unit_box()) == doctest::Approx(1.0 + grid()->dxi()).epsilon(1e-12));
  const auto p = oracles::single_peakon(1.0, 0.0, Grid::make(-15.0, 15.0, 6001));
  CHECK(total_energy(p.mu) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("u_x^2 resolves a kink to second order") {
  auto err = [](std::size_t n) {
    const auto g = Grid::make(-3.0, 3.0, n);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(-std::abs(g->node(i)));
    const auto ux2 = ux_squared(*g, u);
    double e = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) e = std::max(e, std::abs(ux2[i] - u[i] * u[i]));
    return e;
  };
  const double e1 = err(601), e2 = err(1201);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 > 3.5);
}
