#pragma once

#include <cstddef>

#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"

namespace chsys {

/// Map L from Eulerian to Lagrangian coordinates (lands in F_0: y + H = id at the nodes).
///
/// y is the exact left-continuous inverse of x -> x + mu((-inf, x)) for the piecewise-linear
/// density, so atoms become plateaus of y whose width equals the atom mass. Derivative fields
/// take right limits; on plateaus y_xi = 0, H_xi = 1, U_xi = r = 0. Elsewhere
/// y_xi = 1/(1+d), H_xi = d/(1+d) with d the density at y, and U_xi = sign(u_x) sqrt(d - u^2 - rho^2) y_xi,
/// which makes the y_xi H_xi identity hold exactly at the nodes.
///
/// Throws DomainError if the grid leaves more than `coverage_tol` of the energy outside its image.
LagrangianState to_lagrangian(const EulerianState& z, GridPtr grid, double coverage_tol = 1e-9);

struct EulerianOptions {
  double plateau_eps_rel = 1e-10;  // y_xi < plateau_eps_rel * max(y_xi) marks a plateau node
  double plateau_u_tol = 1e-8;     // allowed variation of U along a plateau
};

struct EulerianConversion {
  EulerianState state;
  double plateau_eps = 0.0;
  std::size_t plateau_runs = 0;
  std::size_t rho_flagged_nodes = 0;  // plateau nodes where r is not negligible
};

/// Map M from Lagrangian to Eulerian coordinates on `spatial_grid`: u = U o y^{-1},
/// mu = y_#(H_xi dxi), rho = y_#(r dxi). Each maximal run of plateau nodes becomes one atom whose
/// mass is the H-increment across the plateau, including the sub-cell plateau fractions at
/// both ends. Spatial nodes more than half a spatial cell outside [y(xi_min), y(xi_max)] get
/// u = rho = 0 and zero density.
/// Throws ConstraintViolation if U varies along a plateau.
EulerianConversion to_eulerian_detailed(const LagrangianState& X, GridPtr spatial_grid,
                                        const EulerianOptions& opts = {});
EulerianState to_eulerian(const LagrangianState& X, GridPtr spatial_grid, const EulerianOptions& opts = {});

/// L(M(X)) on the grid of X.
LagrangianState roundtrip_F0(const LagrangianState& X, GridPtr spatial_grid, const EulerianOptions& opts = {});

}  // namespace chsys
