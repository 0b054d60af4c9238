#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chsys/dynamics.hpp"
#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"

// Reference solutions and brute-force counterparts of the fast routines. Nothing here is
// used by the production code paths.
namespace chsys::oracles {

struct Peakon {
  double c;   // amplitude (and speed)
  double x0;  // crest position
};

/// u = c e^{-|x-x0|}, rho = 0, mu = (u^2 + u_x^2) dx.
EulerianState single_peakon(double c, double x0, GridPtr grid);

/// Superposition sum_k c_k e^{-|x - x0_k|} with constant rho. The density uses exact one-sided
/// derivatives, averaged in square at crests.
EulerianState superposed_peakons(const std::vector<Peakon>& peakons, GridPtr grid, double rho = 0.0);

/// Antisymmetric pair: peakon (c, -a) plus antipeakon (-c, a).
EulerianState peakon_antipeakon(double c, double a, GridPtr grid, double rho = 0.0);

/// Traveling peakon at time t: c e^{-|x - x0 - c t|}.
double peakon_value(double c, double x0, double t, double x);

/// (0, 0, E delta_0). E = 0 gives the zero state; E < 0 throws DomainError.
EulerianState collision_state(double E, GridPtr grid);

/// Lagrangian image of the collision state written down directly:
/// y = xi, 0, xi - E and H = 0, xi, E on xi < 0, [0, E), xi >= E.
LagrangianState heaviside_pair(GridPtr grid, double E = 1.0);

/// Direct O(N^2) trapezoid evaluation of P and Q.
KernelValues brute_force_kernels(const LagrangianState& X);

/// Solves y + mu((-inf, y)) = xi per node by bisection. Atom-free measures only.
LagrangianState bisection_L(const EulerianState& z, GridPtr grid, double tol = 1e-13);

/// Closed-form single peakon energy: int (u^2 + u_x^2) dx = 2 c^2.
inline double peakon_energy(double c) { return 2.0 * c * c; }

/// Random smooth state in F: y_xi = 1 + sum of Gaussian bumps, U and r Gaussian sums,
/// H_xi reconstructed from y_xi H_xi = y_xi^2 U^2 + U_xi^2 + r^2 and H by cumulative trapezoid.
LagrangianState random_F_state(GridPtr grid, std::mt19937_64& rng, double amplitude = 0.5);

/// Same as random_F_state, projected to F_0.
LagrangianState random_F0_state(GridPtr grid, std::mt19937_64& rng, double amplitude = 0.5);

/// Smooth random relabeling f = id + sum of Gaussian-derivative bumps, scaled so that
/// kappa(f) is within 0.1% below `kappa`.
Relabeling random_relabeling(GridPtr grid, std::mt19937_64& rng, double kappa);

}  // namespace chsys::oracles
