#include <doctest.h>

#include <cmath>
#include <random>

#include "chsys/dynamics.hpp"
#include "chsys/errors.hpp"
#include "chsys/oracles.hpp"
#include "chsys/transforms.hpp"

using namespace chsys;

TEST_CASE("single peakon") {
  const auto grid = Grid::make(-20.0, 20.0, 8001);
  for (double c : {1.0, -0.5, 2.0}) {
    const auto z = oracles::single_peakon(c, 0.0, grid);
    CHECK(total_energy(z.mu) == doctest::Approx(oracles::peakon_energy(c)).epsilon(1e-5));
    CHECK(z.u[4000] == c);
    CHECK(sup_norm(z.rho) == 0.0);
    // one-sided slopes either side of the crest
    const double h = grid->dxi();
    const double left = (z.u[4000] - z.u[3999]) / h;
    const double right = (z.u[4001] - z.u[4000]) / h;
    CHECK(right - left == doctest::Approx(-2.0 * c).epsilon(1e-2));
    const auto rep = check_in_D(z, 1e-4);
    CHECK(rep.in_D);
    CHECK(rep.max_density_residual < 1e-4);
  }
  CHECK(oracles::peakon_energy(3.0) == 18.0);
  CHECK(oracles::peakon_value(1.0, 0.0, 2.0, 2.0) == 1.0);
  CHECK(oracles::peakon_value(1.0, 0.0, 2.0, 3.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("collision state") {
  const auto spatial = Grid::make(-5.0, 5.0, 101);
  const auto z = oracles::collision_state(1.0, spatial);
  CHECK(sup_norm(z.u) == 0.0);
  REQUIRE(z.mu.atoms.size() == 1);
  CHECK(z.mu.atoms[0].location == 0.0);
  CHECK(z.mu.atoms[0].mass == 1.0);
  CHECK(oracles::collision_state(0.0, spatial).mu.atoms.empty());
  CHECK_THROWS_AS(oracles::collision_state(-1.0, spatial), DomainError);

  const auto lag = Grid::make(-5.0, 6.0, 111);
  CHECK(sup_diff_all(to_lagrangian(z, lag), oracles::heaviside_pair(lag)) < 1e-14);
  CHECK(sup_diff_all(to_lagrangian(oracles::collision_state(0.0, spatial), lag), LagrangianState::ground(lag)) == 0.0);

  // E = 2: the plateau y = 0 covers xi in [0, 2)
  const auto X = to_lagrangian(oracles::collision_state(2.0, spatial), Grid::make(-5.0, 7.0, 121));
  std::size_t plateau = 0;
  for (std::size_t i = 0; i < X.size(); ++i)
    if (X.yxi[i] == 0.0) {
      ++plateau;
      CHECK(X.y[i] == 0.0);
    }
  CHECK(static_cast<double>(plateau) * X.grid->dxi() == doctest::Approx(2.0));
}

TEST_CASE("heaviside pair fields") {
  const auto grid = Grid::make(-2.0, 4.0, 61);
  const auto X = oracles::heaviside_pair(grid, 2.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double xi = grid->node(i);
    const bool on = xi >= -1e-12 && xi < 2.0 - 1e-12;
    const double y = xi < 0 ? xi : (on ? 0.0 : xi - 2.0);
    const double H = xi < 0 ? 0.0 : (on ? xi : 2.0);
    CHECK(X.y[i] == doctest::Approx(y).scale(1.0));
    CHECK(X.H[i] == doctest::Approx(H).scale(1.0));
    CHECK(X.U[i] == 0.0);
    CHECK(X.yxi[i] + X.hxi[i] == 1.0);
  }
}

TEST_CASE("bisection inverse of the energy map") {
  const auto spatial = Grid::make(-15.0, 15.0, 3001);
  const auto lag = Grid::make(-16.0, 18.0, 1001);
  const auto z = oracles::single_peakon(1.0, 0.0, spatial);
  const auto B = oracles::bisection_L(z, lag);
  const auto X = to_lagrangian(z, lag);
  CHECK(sup_diff(B.y, X.y) < 1e-10);
  CHECK(sup_diff(B.H, X.H) < 1e-10);

  const auto G = oracles::bisection_L(EulerianState::zero(spatial), lag);
  for (std::size_t i = 0; i < G.size(); ++i) CHECK(G.y[i] == doctest::Approx(lag->node(i)).scale(1.0).epsilon(1e-12));

  // density 1 on [0, 1]: y = xi, xi / 2, xi - 1 on xi < 0, [0, 2], xi > 2
  auto box = EulerianState::zero(spatial);
  for (std::size_t k = 0; k < spatial->size(); ++k) {
    const double x = spatial->node(k);
    if (x >= -1e-12 && x <= 1.0 + 1e-12) box.mu.density[k] = 1.0;
  }
  const auto lb = Grid::make(-2.0, 4.0, 61);
  const auto Y = oracles::bisection_L(box, lb);
  const double h = spatial->dxi();
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const double xi = lb->node(i);
    const double y = xi < 0 ? xi : (xi <= 2.0 ? 0.5 * xi : xi - 1.0);
    // the sampled box has trapezoid ramps of width h
    CHECK(std::abs(Y.y[i] - y) <= h * (1.0 + 1e-9));
  }

  CHECK_THROWS_AS(oracles::bisection_L(oracles::collision_state(1.0, spatial), lag), DomainError);
}

TEST_CASE("random states") {
  std::mt19937_64 rng(17);
  const auto grid = Grid::make(-10.0, 10.0, 2001);
  for (int t = 0; t < 3; ++t) {
    const auto X = oracles::random_F_state(grid, rng);
    const auto rep = check_in_G(X, 1e-8);
    CHECK(rep.in_G);
    CHECK(lagcoord3_residual(X) < 1e-12);
    const auto Y = oracles::random_F0_state(grid, rng);
    CHECK(check_in_G(Y, 1e-6).f0_residual < 1e-10);
  }
  for (double kappa : {0.05, 0.2, 0.5}) {
    const auto f = oracles::random_relabeling(grid, rng, kappa);
    CHECK(f.kappa() <= kappa);
    CHECK(f.kappa() >= 0.999 * kappa);
  }

  std::mt19937_64 a(3), b(3);
  CHECK(sup_diff_all(oracles::random_F_state(grid, a), oracles::random_F_state(grid, b)) == 0.0);
}

TEST_CASE("peakon-antipeakon pair stays antisymmetric") {
  const auto spatial = Grid::make(-15.0, 15.0, 3001);
  const auto z = oracles::peakon_antipeakon(1.0, 3.0, spatial);
  for (std::size_t k = 0; k < spatial->size(); ++k) CHECK(z.u[k] == doctest::Approx(-z.u[spatial->size() - 1 - k]).scale(1.0));

  const auto lag = Grid::make(-18.0, 22.0, 2001);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 5.0;
  const auto X = to_lagrangian(z, lag);
  const auto tr = evolve(X, cfg);
  // crests between labels cross slightly after the collision
  double repair = 0.0;
  const auto w = to_eulerian(monotone_envelope(tr.final_state, &repair), spatial);
  CHECK(repair < lag->dxi());
  const auto n = spatial->size();
  double asym = 0.0;
  for (std::size_t k = 0; k < n; ++k) asym = std::max(asym, std::abs(w.u[k] + w.u[n - 1 - k]));
  CHECK(asym < 5e-2);
  const double E0 = tr.diagnostics.front().energy;
  CHECK(std::abs(tr.diagnostics.back().energy - E0) < 1e-8 * E0);
}
