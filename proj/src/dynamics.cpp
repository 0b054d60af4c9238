#include "chsys/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chsys/errors.hpp"
#include "chsys/transforms.hpp"

namespace chsys {

namespace {

// Exponential sweeps. gw holds g times the quadrature weight. A neighbour pair with
// y[i+1] <= y[i] counts as a tie, so a small decrease acts as if y were replaced by its
// running envelope instead of reversing the sign of the interaction.
KernelValues sweep_kernels(const std::vector<double>& y, const std::vector<double>& gw) {
  const auto n = y.size();
  std::vector<double> decay(n - 1);
  std::vector<bool> tie(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dy = y[i + 1] - y[i];
    tie[i] = !(dy > 0.0);
    decay[i] = tie[i] ? 1.0 : std::exp(-dy);
  }

  // A_i = sum_{j<=i} e^{-(y_i-y_j)} gw_j, B_i = sum_{j>i} e^{-(y_j-y_i)} gw_j
  std::vector<double> A(n), B(n);
  A[0] = gw[0];
  for (std::size_t i = 1; i < n; ++i) A[i] = decay[i - 1] * A[i - 1] + gw[i];
  B[n - 1] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) B[i] = decay[i] * (B[i + 1] + gw[i + 1]);

  // Runs of equal y: their mutual contributions carry sign 0 in Q.
  std::vector<double> tie_le(n), tie_gt(n);
  for (std::size_t a = 0; a < n;) {
    std::size_t b = a;
    while (b + 1 < n && tie[b]) ++b;
    double run = 0.0;
    for (std::size_t j = a; j <= b; ++j) run += gw[j];
    double acc = 0.0;
    for (std::size_t j = a; j <= b; ++j) {
      acc += gw[j];
      tie_le[j] = acc;
      tie_gt[j] = run - acc;
    }
    a = b + 1;
  }

  KernelValues k{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    k.P[i] = 0.25 * (A[i] + B[i]);
    k.Q[i] = -0.25 * ((A[i] - tie_le[i]) - (B[i] - tie_gt[i]));
  }
  return k;
}

}  // namespace

double max_y_decrease(const LagrangianState& X) {
  double d = 0.0;
  for (std::size_t i = 0; i + 1 < X.size(); ++i) d = std::max(d, X.y[i] - X.y[i + 1]);
  return d;
}

LagrangianState monotone_envelope(const LagrangianState& X, double* repair) {
  X.validate_shape();
  LagrangianState out = X;
  double change = 0.0;
  for (std::size_t i = 1; i < X.size(); ++i) {
    out.y[i] = std::max(out.y[i], out.y[i - 1]);
    out.H[i] = std::max(out.H[i], out.H[i - 1]);
    change = std::max({change, out.y[i] - X.y[i], out.H[i] - X.H[i]});
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    change = std::max({change, -X.yxi[i], -X.hxi[i]});
    out.yxi[i] = std::max(0.0, X.yxi[i]);
    out.hxi[i] = std::max(0.0, X.hxi[i]);
  }
  if (repair) *repair = change;
  return out;
}

KernelValues compute_kernels(const LagrangianState& X, double tol) {
  X.validate_shape();
  const auto n = X.size();
  const auto w = trapezoid_weights(*X.grid);
  std::vector<double> gw(n);
  for (std::size_t j = 0; j < n; ++j) gw[j] = (X.U[j] * X.U[j] * X.yxi[j] + X.hxi[j]) * w[j];

  for (std::size_t i = 0; i + 1 < n; ++i)
    if (X.y[i + 1] - X.y[i] < -tol) throw DomainError("compute_kernels: y decreases at node " + std::to_string(i));
  return sweep_kernels(X.y, gw);
}

LagrangianState rhs(const LagrangianState& X, const KernelValues& k) {
  const auto n = X.size();
  LagrangianState d;
  d.grid = X.grid;
  for (auto* v : {&d.y, &d.U, &d.H, &d.r, &d.yxi, &d.Uxi, &d.hxi}) v->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double U = X.U[i], P = k.P[i], Q = k.Q[i];
    d.y[i] = U;
    d.U[i] = -Q;
    d.H[i] = U * U * U - 2.0 * P * U;
    d.yxi[i] = X.Uxi[i];
    d.Uxi[i] = 0.5 * X.hxi[i] + (0.5 * U * U - P) * X.yxi[i];
    d.hxi[i] = (3.0 * U * U - 2.0 * P) * X.Uxi[i] - 2.0 * Q * U * X.yxi[i];
  }
  return d;
}

LagrangianState rhs(const LagrangianState& X) {
  return rhs(X, compute_kernels(X, std::numeric_limits<double>::infinity()));
}

namespace {

// X + a * dX
LagrangianState axpy(const LagrangianState& X, double a, const LagrangianState& dX) {
  LagrangianState out = X;
  auto upd = [a](std::vector<double>& v, const std::vector<double>& dv) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * dv[i];
  };
  upd(out.y, dX.y);
  upd(out.U, dX.U);
  upd(out.H, dX.H);
  upd(out.r, dX.r);
  upd(out.yxi, dX.yxi);
  upd(out.Uxi, dX.Uxi);
  upd(out.hxi, dX.hxi);
  return out;
}

bool all_finite(const LagrangianState& X) {
  for (const auto* v : {&X.y, &X.U, &X.H, &X.r, &X.yxi, &X.Uxi, &X.hxi})
    for (double x : *v)
      if (!std::isfinite(x)) return false;
  return true;
}

// Clip values in [-tol, 0) to 0; returns false if something lies below -tol.
bool clip_nonnegative(std::vector<double>& v, double tol) {
  for (double& x : v) {
    if (x < -tol) return false;
    if (x < 0.0) x = 0.0;
  }
  return true;
}

}  // namespace

LagrangianState rk4_step(const LagrangianState& X, double dt) {
  const auto k1 = rhs(X);
  const auto k2 = rhs(axpy(X, 0.5 * dt, k1));
  const auto k3 = rhs(axpy(X, 0.5 * dt, k2));
  const auto k4 = rhs(axpy(X, dt, k3));
  LagrangianState out = X;
  const double c = dt / 6.0;
  auto upd = [&](std::vector<double>& v, auto field) {
    const auto& a = k1.*field;
    const auto& b = k2.*field;
    const auto& e = k3.*field;
    const auto& f = k4.*field;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * (a[i] + 2.0 * (b[i] + e[i]) + f[i]);
  };
  upd(out.y, &LagrangianState::y);
  upd(out.U, &LagrangianState::U);
  upd(out.H, &LagrangianState::H);
  upd(out.r, &LagrangianState::r);
  upd(out.yxi, &LagrangianState::yxi);
  upd(out.Uxi, &LagrangianState::Uxi);
  upd(out.hxi, &LagrangianState::hxi);
  return out;
}

DiagnosticsRow diagnose(double t, const LagrangianState& X) {
  DiagnosticsRow row;
  row.t = t;
  row.energy = X.H.back() - X.H.front();
  row.lagcoord3 = lagcoord3_residual(X);
  row.min_yxi = *std::min_element(X.yxi.begin(), X.yxi.end());
  row.max_abs_U = sup_norm(X.U);
  row.max_y_decrease = max_y_decrease(X);
  return row;
}

Trajectory evolve(const LagrangianState& X0, const IntegratorConfig& cfg, const EvolveObserver& observer) {
  X0.validate_shape();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("integrator: dt must be positive");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("integrator: t_end must be nonnegative");
  if (cfg.dt > cfg.stability_factor * X0.grid->dxi() * (1.0 + 1e-12))
    throw ConfigError("integrator: dt exceeds " + num(cfg.stability_factor) + " * dxi");

  std::vector<double> stops;
  for (double t : cfg.snapshot_times) {
    if (t < 0.0 || t > cfg.t_end) throw ConfigError("integrator: snapshot time outside [0, t_end]");
    stops.push_back(t);
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  const std::vector<double> snaps = stops;
  if (stops.empty() || stops.back() < cfg.t_end) stops.push_back(cfg.t_end);

  Trajectory traj;
  LagrangianState X = X0;
  const double residual0 = lagcoord3_residual(X0);
  const double energy0 = X0.H.back() - X0.H.front();
  auto record = [&](double t) {
    const auto row = diagnose(t, X);
    traj.diagnostics.push_back(row);
    if (observer.on_step) observer.on_step(row);
    return row;
  };
  auto maybe_snapshot = [&](double t) {
    if (std::binary_search(snaps.begin(), snaps.end(), t)) {
      traj.times.push_back(t);
      traj.snapshots.push_back(X);
      if (observer.on_snapshot) observer.on_snapshot(t, X);
    }
  };

  double t = 0.0;
  record(t);
  maybe_snapshot(t);
  for (double stop : stops) {
    if (stop <= 0.0) continue;  // t = 0 is already recorded
    while (t < stop) {
      const double remaining = stop - t;
      // merge a tiny remainder into the current step
      const double h = remaining <= cfg.dt * (1.0 + 1e-9) ? remaining : cfg.dt;
      X = rk4_step(X, h);
      t = (h == remaining) ? stop : t + h;

      if (!all_finite(X)) throw IntegrationError("integration produced a non-finite value", t);
      if (!clip_nonnegative(X.yxi, cfg.clip_tol))
        throw IntegrationError("y_xi undershoots below -clip_tol: wave breaking is under-resolved", t);
      if (!clip_nonnegative(X.hxi, cfg.clip_tol))
        throw IntegrationError("H_xi undershoots below -clip_tol", t);
      const auto row = record(t);
      if (row.lagcoord3 > residual0 + cfg.drift_budget)
        throw IntegrationError("y_xi H_xi identity drifted by " + num(row.lagcoord3 - residual0) +
                                   ", budget " + num(cfg.drift_budget),
                               t);
      if (cfg.energy_budget >= 0.0 &&
          std::abs(row.energy - energy0) > cfg.energy_budget * std::max(1.0, std::abs(energy0)))
        throw IntegrationError("energy drift exceeds the budget", t);
    }
    maybe_snapshot(stop);
  }
  traj.final_state = std::move(X);
  return traj;
}

EulerianState semigroup_T(const EulerianState& z0, double t, const IntegratorConfig& cfg, GridPtr lagrangian_grid) {
  const auto X0 = to_lagrangian(z0, std::move(lagrangian_grid));
  IntegratorConfig c = cfg;
  c.t_end = t;
  c.snapshot_times.clear();
  const auto traj = evolve(X0, c);
  return to_eulerian(project_F0(traj.final_state), z0.grid);
}

}  // namespace chsys
