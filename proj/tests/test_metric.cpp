#include <doctest.h>

#include <cmath>
#include <random>

#include "chsys/errors.hpp"
#include "chsys/metric.hpp"
#include "chsys/oracles.hpp"
#include "chsys/transforms.hpp"

using namespace chsys;

TEST_CASE("J of a state with itself") {
  std::mt19937_64 rng(5);
  const auto X = oracles::random_F0_state(Grid::make(-10.0, 10.0, 401), rng);
  const auto e = J_upper(X, X);
  CHECK(e.lower == 0.0);
  CHECK(e.upper == 0.0);
  REQUIRE(e.witness_f1.has_value());
  CHECK(J_objective(X, X, *e.witness_f1, *e.witness_f2) == 0.0);
}

TEST_CASE("J within an equivalence class") {
  std::mt19937_64 rng(6);
  const auto grid = Grid::make(-10.0, 10.0, 2001);
  const auto X = oracles::random_F0_state(grid, rng);
  const auto f = oracles::random_relabeling(grid, rng, 0.3);
  const auto Y = relabel(X, f);
  const auto e = J_upper(X, Y);
  CHECK(e.upper < 1e-3 * norm_E(X));
  CHECK(e.upper < 2.0 * norm_E_diff(X, Y) + 1e-15);
}

TEST_CASE("sandwich on generic pairs") {
  std::mt19937_64 rng(7);
  const auto grid = Grid::make(-10.0, 10.0, 401);
  MetricOptions opts;
  opts.knots = 8;
  for (int t = 0; t < 5; ++t) {
    const auto a = oracles::random_F_state(grid, rng);
    const auto b = oracles::random_F_state(grid, rng);
    const auto e = J_upper(a, b, opts);
    CHECK(e.lower >= 0.0);
    CHECK(e.lower <= e.upper);
    CHECK(e.upper <= 2.0 * norm_E_diff(a, b) * (1.0 + 1e-12));
    CHECK(e.lower == doctest::Approx(0.5 * norm_Linf_diff(a, b)));
    // both terms optimized separately: swapping the arguments swaps the terms
    const auto s = J_upper(b, a, opts);
    CHECK(s.upper == doctest::Approx(e.upper).epsilon(1e-12));
  }
}

TEST_CASE("J on different grids") {
  const auto a = LagrangianState::ground(Grid::make(-1.0, 1.0, 11));
  const auto b = LagrangianState::ground(Grid::make(-1.0, 1.0, 21));
  CHECK_THROWS_AS(J_upper(a, b), StructuralError);
}

TEST_CASE("dM estimate") {
  std::mt19937_64 rng(8);
  const auto grid = Grid::make(-10.0, 10.0, 401);
  const auto a = oracles::random_F0_state(grid, rng);
  const auto b = oracles::random_F0_state(grid, rng);
  const double M = std::max(sup_norm(a.H), sup_norm(b.H)) + 1.0;

  const auto same = dM_estimate(a, a, M);
  CHECK(same.lower == 0.0);
  CHECK(same.upper == 0.0);

  MetricOptions opts;
  opts.knots = 8;
  const auto e = dM_estimate(a, b, M, 2, opts);
  CHECK(e.lower == doctest::Approx(0.5 * norm_Linf_diff(a, b)));
  CHECK(e.lower <= e.upper);
  CHECK(e.upper <= 2.0 * norm_E_diff(a, b) * (1.0 + 1e-12));
  const auto direct = dM_estimate(a, b, M, 1, opts);
  CHECK(e.upper <= direct.upper);
  CHECK(direct.chain.empty());
  if (e.chain_length == 2) CHECK(e.chain.size() == 1);

  CHECK_THROWS_AS(dM_estimate(a, b, 0.5 * sup_norm(a.H), 2, opts), DomainError);
  CHECK_THROWS_AS(dM_estimate(oracles::random_F_state(grid, rng), b, 1e6, 2, opts), DomainError);
}

TEST_CASE("midpoint stays in F0") {
  std::mt19937_64 rng(9);
  const auto grid = Grid::make(-10.0, 10.0, 801);
  const auto a = oracles::random_F0_state(grid, rng);
  const auto b = oracles::random_F0_state(grid, rng);
  const auto m = metric_midpoint(a, b);
  const auto rep = check_in_G(m, 1e-6);
  CHECK(rep.f0_residual < 1e-8);
  // projection to F0 interpolates: O(h^2)
  const double h2 = grid->dxi() * grid->dxi();
  CHECK(lagcoord3_residual(m) < h2);
  CHECK(sup_diff_all(metric_midpoint(a, a), a) < h2);
}

TEST_CASE("collision state against the zero state") {
  const auto spatial = Grid::make(-5.0, 5.0, 201);
  const auto lag = Grid::make(-5.0, 6.0, 221);
  const auto zero = EulerianState::zero(spatial);
  const auto delta = oracles::collision_state(1.0, spatial);
  const auto e = d_DM(delta, zero, 2.0, lag);
  // sup|zeta| = 1, sup|U| = 0, sup|H| = 1, summed
  CHECK(e.lower == doctest::Approx(0.5 * (1.0 + 0.0 + 1.0)));
  CHECK(e.upper >= e.lower);
  const auto same = d_DM(delta, delta, 2.0, lag);
  CHECK(same.upper == 0.0);
  CHECK(same.lower == 0.0);
  CHECK_THROWS_AS(d_DM(delta, zero, 0.5, lag), DomainError);
}

TEST_CASE("peakons with nearby speeds") {
  const auto spatial = Grid::make(-15.0, 15.0, 1501);
  const auto lag = Grid::make(-16.0, 18.0, 1701);
  MetricOptions opts;
  opts.knots = 8;
  const auto base = oracles::single_peakon(1.0, 0.0, spatial);
  double prev = INFINITY;
  for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0}) {
    const auto e = d_DM(base, oracles::single_peakon(1.0 + eps, 0.0, spatial), 10.0, lag, 2, opts);
    CHECK(e.upper <= prev);
    prev = e.upper;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("r separation") {
  const auto grid = Grid::make(-3.0, 3.0, 601);
  auto X = LagrangianState::ground(grid);
  CHECK(sup_norm(r_separation(X)) == 0.0);

  for (std::size_t i = 0; i < X.size(); ++i) {
    const double xi = grid->node(i);
    if (xi >= -1e-12 && xi <= 1.0 + 1e-12) X.r[i] = std::exp(std::abs(xi));
  }
  const auto R = r_separation(X);
  const double h = grid->dxi();
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double xi = grid->node(i);
    // a trapezoid ramp of area h/2 at each jump
    CHECK(std::abs(R[i] - std::clamp(xi, 0.0, 1.0)) <= h + 1e-12);
  }
  CHECK(R.back() == doctest::Approx(1.0 + h).epsilon(1e-12));

  auto Y = X;
  for (auto& r : Y.r) r = -r;
  const auto Rn = r_separation(Y);
  for (std::size_t i = 0; i < X.size(); ++i) CHECK(R[i] - Rn[i] == doctest::Approx(2.0 * R[i]));
}
