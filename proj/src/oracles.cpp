#include "chsys/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "chsys/errors.hpp"

namespace chsys::oracles {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

struct Bump {
  double center;
  double sigma;
  double a;  // amplitude of g
};

double gauss(const Bump& b, double x) {
  const double s = (x - b.center) / b.sigma;
  return std::exp(-0.5 * s * s);
}

double gauss_dx(const Bump& b, double x) { return -(x - b.center) / (b.sigma * b.sigma) * gauss(b, x); }

// Bumps well inside the grid so that everything decays below 1e-8 at the boundary.
std::vector<Bump> random_bumps(const Grid& g, std::mt19937_64& rng, std::size_t count, double amp) {
  const double L = g.xi_max() - g.xi_min();
  std::uniform_real_distribution<double> center(g.xi_min() + 0.35 * L, g.xi_max() - 0.35 * L);
  std::uniform_real_distribution<double> width(0.03 * L, 0.05 * L);
  std::uniform_real_distribution<double> amplitude(-amp, amp);
  std::vector<Bump> out(count);
  for (auto& b : out) {
    b.center = center(rng);
    b.sigma = width(rng);
    b.a = amplitude(rng);
  }
  return out;
}

}  // namespace

EulerianState single_peakon(double c, double x0, GridPtr grid) {
  auto z = EulerianState::zero(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double e = std::exp(-std::abs(grid->node(i) - x0));
    z.u[i] = c * e;
    z.mu.density[i] = 2.0 * c * c * e * e;
  }
  return z;
}

EulerianState superposed_peakons(const std::vector<Peakon>& peakons, GridPtr grid, double rho) {
  auto z = EulerianState::zero(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->node(i);
    double u = 0.0, left = 0.0, right = 0.0;
    for (const auto& p : peakons) {
      const double e = std::exp(-std::abs(x - p.x0));
      u += p.c * e;
      // one-sided derivatives of c e^{-|x - x0|}
      if (x > p.x0) {
        left -= p.c * e;
        right -= p.c * e;
      } else if (x < p.x0) {
        left += p.c * e;
        right += p.c * e;
      } else {
        left += p.c;
        right -= p.c;
      }
    }
    z.u[i] = u;
    z.rho[i] = rho;
    z.mu.density[i] = u * u + 0.5 * (left * left + right * right) + rho * rho;
  }
  return z;
}

EulerianState peakon_antipeakon(double c, double a, GridPtr grid, double rho) {
  return superposed_peakons({{c, -a}, {-c, a}}, std::move(grid), rho);
}

double peakon_value(double c, double x0, double t, double x) { return c * std::exp(-std::abs(x - x0 - c * t)); }

EulerianState collision_state(double E, GridPtr grid) {
  if (E < 0.0) throw DomainError("collision_state: negative energy");
  auto z = EulerianState::zero(std::move(grid));
  if (E > 0.0) z.mu.atoms.push_back({0.0, E});
  return z;
}

LagrangianState heaviside_pair(GridPtr grid, double E) {
  auto X = LagrangianState::ground(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double xi = grid->node(i);
    if (xi < 0.0) {
      X.y[i] = xi;
      X.H[i] = 0.0;
    } else if (xi < E) {
      X.y[i] = 0.0;
      X.H[i] = xi;
      X.yxi[i] = 0.0;
      X.hxi[i] = 1.0;
    } else {
      X.y[i] = xi - E;
      X.H[i] = E;
    }
  }
  return X;
}

KernelValues brute_force_kernels(const LagrangianState& X) {
  X.validate_shape();
  const auto n = X.size();
  const auto w = trapezoid_weights(*X.grid);
  KernelValues k{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double p = 0.0, q = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = X.y[i] - X.y[j];
      const double term = std::exp(-std::abs(d)) * (X.U[j] * X.U[j] * X.yxi[j] + X.hxi[j]) * w[j];
      p += term;
      q += sgn(d) * term;
    }
    k.P[i] = 0.25 * p;
    k.Q[i] = -0.25 * q;
  }
  return k;
}

LagrangianState bisection_L(const EulerianState& z, GridPtr grid, double tol) {
  z.validate_shape();
  if (!z.mu.atoms.empty()) throw DomainError("bisection_L: measure has atoms");
  const CumulativeEnergy cum(z.mu);
  const double total = cum.total();
  const auto& sg = *z.grid;
  auto X = LagrangianState::ground(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double xi = grid->node(i);
    // x + F(x) = xi has its root in [xi - total, xi]
    double lo = xi - total - 1.0, hi = xi + 1.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (mid + cum(mid) < xi ? lo : hi) = mid;
    }
    const double y = 0.5 * (lo + hi);
    const double d = cum.density_at(y);
    const bool inside = y >= sg.xi_min() && y <= sg.xi_max();
    const double u = inside ? interpolate(sg, z.u, y) : 0.0;
    const double rho = inside ? interpolate(sg, z.rho, y) : 0.0;
    double s = 0.0;
    if (y >= sg.xi_min() && y < sg.xi_max()) {
      const auto j = sg.cell_of(y);
      s = z.u[j + 1] >= z.u[j] ? 1.0 : -1.0;
    }
    X.y[i] = y;
    X.H[i] = xi - y;
    X.U[i] = u;
    X.yxi[i] = 1.0 / (1.0 + d);
    X.hxi[i] = d / (1.0 + d);
    X.Uxi[i] = s * std::sqrt(std::max(0.0, d - u * u - rho * rho)) / (1.0 + d);
    X.r[i] = rho / (1.0 + d);
  }
  return X;
}

LagrangianState random_F_state(GridPtr grid, std::mt19937_64& rng, double amplitude) {
  const auto& g = *grid;
  // |a| e^{-1/2} per bump keeps y_xi >= 1 - 3 * 0.61 * amplitude > 0 for amplitude <= 0.5
  const auto ybumps = random_bumps(g, rng, 3, std::min(amplitude, 0.5));
  const auto ubumps = random_bumps(g, rng, 3, 1.0);
  const auto rbumps = random_bumps(g, rng, 2, 0.5);
  auto X = LagrangianState::ground(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.node(i);
    double y = xi, yxi = 1.0, U = 0.0, Uxi = 0.0, r = 0.0;
    for (const auto& b : ybumps) {
      y += b.a * b.sigma * gauss(b, xi);
      yxi += b.a * b.sigma * gauss_dx(b, xi);
    }
    for (const auto& b : ubumps) {
      U += b.a * gauss(b, xi);
      Uxi += b.a * gauss_dx(b, xi);
    }
    for (const auto& b : rbumps) r += b.a * gauss(b, xi);
    X.y[i] = y;
    X.yxi[i] = yxi;
    X.U[i] = U;
    X.Uxi[i] = Uxi;
    X.r[i] = r;
    X.hxi[i] = (yxi * yxi * U * U + Uxi * Uxi + r * r) / yxi;
  }
  X.H = cumulative_trapezoid(X.hxi, g.dxi());
  return X;
}

LagrangianState random_F0_state(GridPtr grid, std::mt19937_64& rng, double amplitude) {
  return project_F0(random_F_state(std::move(grid), rng, amplitude));
}

Relabeling random_relabeling(GridPtr grid, std::mt19937_64& rng, double kappa) {
  const auto& g = *grid;
  const auto bumps = random_bumps(g, rng, 3, 1.0);
  std::vector<double> shape(g.size());
  double max_slope = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0, ds = 0.0;
    for (const auto& b : bumps) {
      s += b.a * b.sigma * gauss(b, g.node(i));
      ds += b.a * b.sigma * gauss_dx(b, g.node(i));
    }
    shape[i] = s;
    max_slope = std::max(max_slope, std::abs(ds));
  }
  auto make = [&](double scale) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = g.node(i) + scale * shape[i];
    return Relabeling::from_values(grid, std::move(f));
  };
  if (kappa <= 0.0 || max_slope == 0.0) return Relabeling::identity(grid);
  // largest scale with kappa(f) <= kappa; slopes stay >= 1/2 so f is invertible throughout
  double lo = 0.0, hi = 0.5 / max_slope;
  if (make(hi).kappa() <= kappa) return make(hi);
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto f = make(mid);
    const double k = f.kappa();
    if (k <= kappa && k >= 0.999 * kappa) return f;
    (k <= kappa ? lo : hi) = mid;
  }
  return make(lo);
}

}  // namespace chsys::oracles
