#pragma once

#include <optional>
#include <vector>

#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"

namespace chsys {

/// Interval [lower, upper] bracketing J or d^M, with the relabelings that attain `upper`.
struct MetricEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<Relabeling> witness_f1;  // X_a o f1 vs X_b
  std::optional<Relabeling> witness_f2;  // X_a vs X_b o f2
  std::vector<LagrangianState> chain;    // intermediate states of the best chain (empty for a direct J)
  std::size_t chain_length = 1;          // number of J terms in the best chain
};

struct MetricOptions {
  std::size_t knots = 32;       // coarse knots of the piecewise-linear correction
  std::size_t passes = 2;       // coordinate-descent sweeps
  double step_fraction = 0.1;   // initial trial step, in units of the knot spacing
  bool refine = true;
};

/// ||X_a o f1 - X_b|| + ||X_a - X_b o f2|| in the E-norm.
double J_objective(const LagrangianState& a, const LagrangianState& b, const Relabeling& f1, const Relabeling& f2);

/// Upper bound of J from candidate relabelings: identity and the matched rearrangement
/// (y_a + H_a)^{-1} o (y_b + H_b) for the first term (roles swapped for the second), each refined
/// by coordinate descent. The two terms are optimized independently, which makes the estimate
/// symmetric in (a, b). lower = ||X_a - X_b||_{L^inf} / 2.
MetricEstimate J_upper(const LagrangianState& a, const LagrangianState& b, const MetricOptions& opts = {});

/// Midpoint between two states: field-wise average with H_xi recomputed from
/// y_xi H_xi = y_xi^2 U^2 + U_xi^2 + r^2, H by cumulative quadrature, then projected to F_0.
LagrangianState metric_midpoint(const LagrangianState& a, const LagrangianState& b);

/// Estimate of d^M over chains of length 1 (direct J) and, if chain_length >= 2, through the midpoint.
/// Throws DomainError unless both states are in F_0 with ||H||_inf <= M.
MetricEstimate dM_estimate(const LagrangianState& a, const LagrangianState& b, double M,
                           std::size_t chain_length = 2, const MetricOptions& opts = {});

/// d^M of the Lagrangian images on `lagrangian_grid`. Throws DomainError if either total energy exceeds M.
MetricEstimate d_DM(const EulerianState& a, const EulerianState& b, double M, GridPtr lagrangian_grid,
                    std::size_t chain_length = 2, const MetricOptions& opts = {});

/// R(xi) = int_{-inf}^{xi} r(eta) e^{-|eta|} d eta by cumulative trapezoid.
std::vector<double> r_separation(const LagrangianState& X);

}  // namespace chsys
