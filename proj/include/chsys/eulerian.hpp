#pragma once

#include <vector>

#include "chsys/grid.hpp"

namespace chsys {

struct Atom {
  double location;
  double mass;
};

/// Positive energy measure: piecewise-linear density on a spatial grid (zero outside it)
/// plus a finite list of atoms with strictly increasing locations.
struct EnergyMeasure {
  GridPtr grid;
  std::vector<double> density;
  std::vector<Atom> atoms;

  static EnergyMeasure zero(GridPtr grid);
};

/// Eulerian triple (u, rho, mu).
struct EulerianState {
  GridPtr grid;
  std::vector<double> u;
  std::vector<double> rho;
  EnergyMeasure mu;

  static EulerianState zero(GridPtr grid);
  void validate_shape() const;
};

/// mu((-inf, x)): atoms located exactly at x are excluded.
double cumulative(const EnergyMeasure& mu, double x);

/// Precomputed form of `cumulative` for repeated evaluation.
class CumulativeEnergy {
 public:
  explicit CumulativeEnergy(const EnergyMeasure& mu);
  double operator()(double x) const;
  /// Density interpolant at x (zero outside the grid).
  double density_at(double x) const;
  double total() const noexcept { return total_; }

 private:
  GridPtr grid_;
  std::vector<double> density_;
  std::vector<double> prefix_;  // density integral up to each node
  std::vector<Atom> atoms_;
  double total_;
};

double total_energy(const EnergyMeasure& mu);

/// Nodal estimate of u_x^2 from second-order one-sided differences. The two sides are averaged
/// in square unless one stencil is much rougher (it straddles a kink), in which case only the
/// smooth side is used. Peakon crests are resolved to O(h^2).
std::vector<double> ux_squared(const Grid& grid, const std::vector<double>& u);

struct DReport {
  double max_density_residual = 0.0;
  double total_energy = 0.0;
  bool structurally_valid = false;  // density >= 0, masses > 0, locations increasing
  bool in_D = false;

  bool in_DM(double M) const noexcept { return in_D && total_energy <= M; }
};

DReport check_in_D(const EulerianState& z, double tol);

}  // namespace chsys
