#include "chsys/eulerian.hpp"

#include <algorithm>
#include <cmath>

#include "chsys/errors.hpp"

namespace chsys {

EnergyMeasure EnergyMeasure::zero(GridPtr grid) {
  EnergyMeasure mu;
  mu.density.assign(grid->size(), 0.0);
  mu.grid = std::move(grid);
  return mu;
}

EulerianState EulerianState::zero(GridPtr grid) {
  EulerianState z;
  z.u.assign(grid->size(), 0.0);
  z.rho.assign(grid->size(), 0.0);
  z.mu = EnergyMeasure::zero(grid);
  z.grid = std::move(grid);
  return z;
}

void EulerianState::validate_shape() const {
  if (!grid) throw StructuralError("Eulerian state has no grid");
  const auto n = grid->size();
  if (u.size() != n || rho.size() != n || mu.density.size() != n)
    throw StructuralError("Eulerian state fields do not match the grid");
  if (!same_grid(grid, mu.grid)) throw StructuralError("energy measure lives on a different grid");
}

CumulativeEnergy::CumulativeEnergy(const EnergyMeasure& mu)
    : grid_(mu.grid),
      density_(mu.density),
      prefix_(cumulative_trapezoid(mu.density, mu.grid->dxi())),
      atoms_(mu.atoms),
      total_(total_energy(mu)) {}

double CumulativeEnergy::operator()(double x) const {
  double c = 0.0;
  for (const auto& a : atoms_) {
    if (a.location < x) c += a.mass;
    else break;
  }
  const auto& g = *grid_;
  if (x <= g.xi_min()) return c;
  if (x >= g.xi_max()) return c + prefix_.back();
  const auto j = g.cell_of(x);
  const double h = g.dxi();
  const double t = (x - g.node(j)) / h;
  const auto& d = density_;
  return c + prefix_[j] + h * t * (d[j] + 0.5 * t * (d[j + 1] - d[j]));
}

double CumulativeEnergy::density_at(double x) const {
  const auto& g = *grid_;
  if (x < g.xi_min() || x > g.xi_max()) return 0.0;
  return interpolate(g, density_, x);
}

double cumulative(const EnergyMeasure& mu, double x) { return CumulativeEnergy(mu)(x); }

double total_energy(const EnergyMeasure& mu) {
  double m = trapezoid(mu.density, mu.grid->dxi());
  for (const auto& a : mu.atoms) m += a.mass;
  return m;
}

std::vector<double> ux_squared(const Grid& grid, const std::vector<double>& u) {
  const auto n = u.size();
  const double h = grid.dxi();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fwd = i + 2 < n;
    const bool bwd = i >= 2;
    const double dp = fwd ? (-3.0 * u[i] + 4.0 * u[i + 1] - u[i + 2]) / (2.0 * h) : 0.0;
    const double dm = bwd ? (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * h) : 0.0;
    if (fwd && bwd) {
      // a stencil that straddles a kink has a second difference O(h) instead of O(h^2)
      const double cp = std::abs(u[i] - 2.0 * u[i + 1] + u[i + 2]);
      const double cm = std::abs(u[i] - 2.0 * u[i - 1] + u[i - 2]);
      if (cm > 4.0 * cp + 1e-300) out[i] = dp * dp;
      else if (cp > 4.0 * cm + 1e-300) out[i] = dm * dm;
      else out[i] = 0.5 * (dp * dp + dm * dm);
    } else if (fwd) out[i] = dp * dp;
    else if (bwd) out[i] = dm * dm;
    else {
      const double dc = (u[i + 1] - u[i - 1]) / (2.0 * h);
      out[i] = dc * dc;
    }
  }
  return out;
}

DReport check_in_D(const EulerianState& z, double tol) {
  z.validate_shape();
  DReport rep;
  bool valid = true;
  for (double d : z.mu.density) valid = valid && d >= 0.0;
  for (std::size_t k = 0; k < z.mu.atoms.size(); ++k) {
    valid = valid && z.mu.atoms[k].mass > 0.0;
    if (k > 0) valid = valid && z.mu.atoms[k].location > z.mu.atoms[k - 1].location;
  }
  const auto ux2 = ux_squared(*z.grid, z.u);
  for (std::size_t i = 0; i < z.u.size(); ++i) {
    const double expected = z.u[i] * z.u[i] + ux2[i] + z.rho[i] * z.rho[i];
    rep.max_density_residual = std::max(rep.max_density_residual, std::abs(z.mu.density[i] - expected));
  }
  rep.total_energy = total_energy(z.mu);
  rep.structurally_valid = valid;
  rep.in_D = valid && rep.max_density_residual <= tol;
  return rep;
}

}  // namespace chsys
