#pragma once

#include <functional>
#include <vector>

#include "chsys/eulerian.hpp"
#include "chsys/lagrangian.hpp"

namespace chsys {

struct KernelValues {
  std::vector<double> P;
  std::vector<double> Q;
};

/// P and Q by two exponential sweeps in O(N). Trapezoid weights in eta; sign(0) = 0 for
/// nodes sharing the same y, matching the direct double sum for nondecreasing y. A decrease
/// of y between neighbours is treated as a tie.
/// Throws DomainError if y decreases by more than `tol` between neighbouring nodes.
KernelValues compute_kernels(const LagrangianState& X, double tol = 1e-10);

/// Largest decrease of y between neighbouring nodes (0 for monotone y). Nonzero values mean
/// that discretization error let characteristics cross.
double max_y_decrease(const LagrangianState& X);

/// y and H replaced by their running maxima, negative y_xi and H_xi by 0: the state the kernels
/// see. `repair`, if given, receives the largest change made.
LagrangianState monotone_envelope(const LagrangianState& X, double* repair = nullptr);

/// Time derivative of all seven fields, returned in a LagrangianState used as a tangent vector.
/// Kernels are evaluated without a monotonicity check; crossings show up in the diagnostics.
LagrangianState rhs(const LagrangianState& X);
LagrangianState rhs(const LagrangianState& X, const KernelValues& k);

struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 1.0;
  std::vector<double> snapshot_times;
  double drift_budget = 1e-6;      // allowed growth of the y_xi H_xi residual
  double clip_tol = 1e-6;          // y_xi, H_xi in [-clip_tol, 0) are clipped to 0
  double energy_budget = 1e-6;     // relative drift of H(+inf) - H(-inf); < 0 disables the check
  double stability_factor = 0.5;   // dt <= stability_factor * dxi
};

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;  // H at the right end minus H at the left end
  double lagcoord3 = 0.0;
  double min_yxi = 0.0;
  double max_abs_U = 0.0;
  double max_y_decrease = 0.0;
};

DiagnosticsRow diagnose(double t, const LagrangianState& X);

struct Trajectory {
  std::vector<double> times;
  std::vector<LagrangianState> snapshots;
  std::vector<DiagnosticsRow> diagnostics;  // one row per step, starting at t = 0
  LagrangianState final_state;
};

struct EvolveObserver {
  std::function<void(double, const LagrangianState&)> on_snapshot;
  std::function<void(const DiagnosticsRow&)> on_step;
};

/// Classical four-stage Runge-Kutta with a fixed step. Steps are shortened to land exactly on
/// snapshot times and t_end. Throws ConfigError for an invalid configuration and
/// IntegrationError on NaN, unresolved wave breaking or an exceeded drift budget.
Trajectory evolve(const LagrangianState& X0, const IntegratorConfig& cfg, const EvolveObserver& observer = {});

/// One RK4 step without checks.
LagrangianState rk4_step(const LagrangianState& X, double dt);

/// T_t = M Pi S_t L, output on the spatial grid of z0.
EulerianState semigroup_T(const EulerianState& z0, double t, const IntegratorConfig& cfg, GridPtr lagrangian_grid);

}  // namespace chsys
