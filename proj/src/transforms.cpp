#include "chsys/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chsys/errors.hpp"

namespace chsys {

namespace {

struct Breakpoint {
  double x;
  double w_minus;  // x + mu((-inf, x))
  double mass;     // atom at x, 0 if none
  double density;  // density interpolant at x
};

std::vector<Breakpoint> breakpoints(const EulerianState& z, const CumulativeEnergy& cum) {
  const auto& g = *z.grid;
  std::vector<Breakpoint> pts;
  pts.reserve(g.size() + z.mu.atoms.size());
  std::size_t a = 0;
  const auto& atoms = z.mu.atoms;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    while (a < atoms.size() && atoms[a].location < x) {
      pts.push_back({atoms[a].location, 0.0, atoms[a].mass, 0.0});
      ++a;
    }
    double m = 0.0;
    if (a < atoms.size() && atoms[a].location == x) m = atoms[a++].mass;
    pts.push_back({x, 0.0, m, 0.0});
  }
  if (a < atoms.size()) throw DomainError("to_lagrangian: atom outside the spatial grid");
  for (auto& p : pts) {
    p.w_minus = p.x + cum(p.x);
    p.density = cum.density_at(p.x);
  }
  return pts;
}

// Interpolant of nodal values inside the grid, zero outside.
double inside_or_zero(const Grid& g, const std::vector<double>& v, double x) {
  if (x < g.xi_min() || x > g.xi_max()) return 0.0;
  return interpolate(g, v, x);
}

}  // namespace

LagrangianState to_lagrangian(const EulerianState& z, GridPtr grid, double coverage_tol) {
  z.validate_shape();
  if (!grid) throw StructuralError("to_lagrangian: no target grid");
  for (std::size_t k = 0; k < z.mu.atoms.size(); ++k) {
    if (!(z.mu.atoms[k].mass > 0.0)) throw DomainError("to_lagrangian: atom mass must be positive");
    if (k > 0 && !(z.mu.atoms[k].location > z.mu.atoms[k - 1].location))
      throw DomainError("to_lagrangian: atom locations must be strictly increasing");
  }
  for (double d : z.mu.density)
    if (d < 0.0) throw DomainError("to_lagrangian: negative energy density");

  const CumulativeEnergy cum(z.mu);
  const auto pts = breakpoints(z, cum);
  const auto& sg = *z.grid;

  auto X = LagrangianState::ground(grid);
  const auto n = grid->size();
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = grid->node(i);
    const auto it = std::upper_bound(pts.begin(), pts.end(), xi,
                                     [](double v, const Breakpoint& p) { return v < p.w_minus; });
    double y = xi;
    double d = 0.0;
    bool plateau = false;
    if (it != pts.begin()) {
      const auto k = static_cast<std::size_t>(it - pts.begin()) - 1;
      const auto& p = pts[k];
      const double delta = xi - (p.w_minus + p.mass);
      if (delta < 0.0) {
        y = p.x;
        plateau = true;
      } else if (k + 1 == pts.size()) {
        y = p.x + delta;
        d = 0.0;
      } else {
        const auto& q = pts[k + 1];
        const double len = q.x - p.x;
        const double slope = (q.density - p.density) / len;
        const double b = 1.0 + p.density;
        double t = 2.0 * delta / (b + std::sqrt(std::max(0.0, b * b + 2.0 * slope * delta)));
        t = std::clamp(t, 0.0, len);
        y = p.x + t;
        d = t >= len ? q.density : p.density + slope * t;
      }
    }

    X.y[i] = y;
    X.H[i] = xi - y;
    if (plateau) {
      X.U[i] = inside_or_zero(sg, z.u, y);
      X.yxi[i] = 0.0;
      X.hxi[i] = 1.0;
      X.Uxi[i] = 0.0;
      X.r[i] = 0.0;
      continue;
    }
    const double u = inside_or_zero(sg, z.u, y);
    const double rho = inside_or_zero(sg, z.rho, y);
    const double yxi = 1.0 / (1.0 + d);
    double sign = 0.0;
    if (y >= sg.xi_min() && y < sg.xi_max()) {
      const auto j = sg.cell_of(y);
      sign = z.u[j + 1] >= z.u[j] ? 1.0 : -1.0;
    }
    X.U[i] = u;
    X.yxi[i] = yxi;
    X.hxi[i] = d * yxi;
    X.Uxi[i] = sign * std::sqrt(std::max(0.0, d - u * u - rho * rho)) * yxi;
    X.r[i] = rho * yxi;
  }

  const double total = cum.total();
  const double tol = coverage_tol * std::max(1.0, total);
  if (X.H.front() > tol || total - X.H.back() > tol)
    throw DomainError("to_lagrangian: Lagrangian grid [" + num(grid->xi_min()) + ", " +
                      num(grid->xi_max()) + "] does not cover the energy support");
  return X;
}

EulerianConversion to_eulerian_detailed(const LagrangianState& X, GridPtr spatial_grid,
                                        const EulerianOptions& opts) {
  X.validate_shape();
  if (!spatial_grid) throw StructuralError("to_eulerian: no spatial grid");
  const auto n = X.size();
  const double h = X.grid->dxi();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (X.y[i + 1] < X.y[i] - 1e-10 * std::max(1.0, std::abs(X.y[i])))
      throw DomainError("to_eulerian: y decreases at node " + std::to_string(i));
  }

  EulerianConversion out;
  out.plateau_eps = opts.plateau_eps_rel * *std::max_element(X.yxi.begin(), X.yxi.end());
  const double eps = out.plateau_eps;
  auto is_plateau = [&](std::size_t i) { return X.yxi[i] < eps; };

  const double u_scale = std::max(1.0, sup_norm(X.U));
  const double r_tol = std::sqrt(eps * std::max(1.0, sup_norm(X.hxi))) + 1e-12;
  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < n;) {
    if (!is_plateau(a)) {
      ++a;
      continue;
    }
    std::size_t b = a;
    while (b + 1 < n && is_plateau(b + 1)) ++b;
    ++out.plateau_runs;

    const std::size_t end = std::min(b + 1, n - 1);
    for (std::size_t j = a; j <= end; ++j) {
      if (std::abs(X.U[j] - X.U[a]) > opts.plateau_u_tol * u_scale)
        throw ConstraintViolation("to_eulerian: U is not constant on the plateau starting at node " +
                                  std::to_string(a));
      if (j <= b && std::abs(X.r[j]) > r_tol) ++out.rho_flagged_nodes;
    }

    double mass = X.H[b] - X.H[a];
    if (a > 0) {
      const double len = std::clamp((X.y[a] - X.y[a - 1]) / X.yxi[a - 1], 0.0, h);
      mass += std::max(0.0, (X.H[a] - X.H[a - 1]) - X.hxi[a - 1] * len);
    }
    if (b + 1 < n) {
      const double len = std::clamp((X.y[b + 1] - X.y[b]) / X.yxi[b + 1], 0.0, h);
      mass += std::max(0.0, (X.H[b + 1] - X.H[b]) - X.hxi[b + 1] * len);
    }
    if (mass > 0.0) {
      const double loc = X.y[a];
      if (!atoms.empty() && atoms.back().location >= loc) atoms.back().mass += mass;
      else atoms.push_back({loc, mass});
    }
    a = b + 1;
  }

  const auto& sg = *spatial_grid;
  auto z = EulerianState::zero(spatial_grid);
  z.mu.atoms = std::move(atoms);
  auto ratio = [&](const std::vector<double>& num, std::size_t i) { return num[i] / X.yxi[i]; };
  // the ends of the image are known to grid accuracy only
  const double reach = 0.5 * sg.dxi();
  for (std::size_t k = 0; k < sg.size(); ++k) {
    const double x = sg.node(k);
    // outside the image of y the truncated state says nothing: vacuum
    if (x < X.y.front() - reach || x > X.y.back() + reach) continue;
    const auto it = std::upper_bound(X.y.begin(), X.y.end(), x);
    std::size_t i0, i1;
    double theta;
    if (it == X.y.begin()) {
      i0 = i1 = 0;
      theta = 0.0;
    } else if (it == X.y.end()) {
      i0 = i1 = n - 1;
      theta = 0.0;
    } else {
      i1 = static_cast<std::size_t>(it - X.y.begin());
      i0 = i1 - 1;
      theta = (x - X.y[i0]) / (X.y[i1] - X.y[i0]);
    }
    z.u[k] = X.U[i0] + theta * (X.U[i1] - X.U[i0]);
    const bool s0 = !is_plateau(i0);
    const bool s1 = !is_plateau(i1);
    if (s0 && s1) {
      z.mu.density[k] = ratio(X.hxi, i0) + theta * (ratio(X.hxi, i1) - ratio(X.hxi, i0));
      z.rho[k] = ratio(X.r, i0) + theta * (ratio(X.r, i1) - ratio(X.r, i0));
    } else if (s0 || s1) {
      const auto i = s0 ? i0 : i1;
      z.mu.density[k] = ratio(X.hxi, i);
      z.rho[k] = ratio(X.r, i);
    }
    z.mu.density[k] = std::max(0.0, z.mu.density[k]);
  }
  out.state = std::move(z);
  return out;
}

EulerianState to_eulerian(const LagrangianState& X, GridPtr spatial_grid, const EulerianOptions& opts) {
  return to_eulerian_detailed(X, std::move(spatial_grid), opts).state;
}

LagrangianState roundtrip_F0(const LagrangianState& X, GridPtr spatial_grid, const EulerianOptions& opts) {
  return to_lagrangian(to_eulerian(X, std::move(spatial_grid), opts), X.grid);
}

}  // namespace chsys
