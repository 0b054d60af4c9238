#include "chsys/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chsys/errors.hpp"
#include "chsys/transforms.hpp"

namespace chsys {

namespace {

void require_same_grid(const LagrangianState& a, const LagrangianState& b) {
  a.validate_shape();
  b.validate_shape();
  if (!same_grid(a.grid, b.grid)) throw StructuralError("metric: states live on different grids");
}

std::vector<double> w_of(const LagrangianState& X) {
  std::vector<double> w(X.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = X.y[i] + X.H[i];
  return w;
}

struct Candidate {
  Relabeling f;
  double value;
};

// argmin over f of ||A o f - B||
Candidate best_relabeling(const LagrangianState& A, const LagrangianState& B, const MetricOptions& opts) {
  const auto& grid = A.grid;
  const auto& g = *grid;
  const auto n = g.size();
  auto cost = [&](const Relabeling& f) { return norm_E_diff(relabel(A, f), B); };

  Candidate best{Relabeling::identity(grid), 0.0};
  best.value = cost(best.f);
  // w_A o f = w_B, solved with the piecewise-linear and the cubic interpolant of w_A
  const auto wa = w_of(A);
  const auto wb = w_of(B);
  std::vector<double> dwa(n);
  for (std::size_t i = 0; i < n; ++i) dwa[i] = A.yxi[i] + A.hxi[i];
  for (int cubic = 0; cubic < 2; ++cubic) {
    try {
      auto matched = Relabeling::from_values(
          grid, cubic ? invert_monotone_hermite_at(g, wa, dwa, wb, 1e-10) : invert_monotone_at(g, wa, wb, 1e-10));
      const double v = cost(matched);
      if (v < best.value) best = {std::move(matched), v};
    } catch (const DomainError&) {
      // w not invertible to working precision
    }
  }
  if (!opts.refine || opts.knots < 1 || best.value == 0.0) return best;

  // f = base + delta, delta piecewise linear on coarse knots
  const std::size_t K = std::min(opts.knots, n - 1);
  std::vector<std::size_t> knot(K + 1);
  for (std::size_t m = 0; m <= K; ++m) knot[m] = m * (n - 1) / K;
  const std::vector<double> base(best.f.values().begin(), best.f.values().end());
  std::vector<double> delta(K + 1, 0.0);
  auto build = [&](const std::vector<double>& d) {
    std::vector<double> f(base);
    for (std::size_t m = 0; m < K; ++m) {
      const auto i0 = knot[m], i1 = knot[m + 1];
      for (std::size_t i = i0; i <= i1; ++i) {
        const double t = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
        f[i] += (1.0 - t) * d[m] + t * d[m + 1];
      }
    }
    return Relabeling::from_values(grid, std::move(f));
  };

  double step = opts.step_fraction * (g.xi_max() - g.xi_min()) / static_cast<double>(K);
  for (std::size_t pass = 0; pass < opts.passes; ++pass, step *= 0.5) {
    for (std::size_t m = 0; m <= K; ++m) {
      for (double trial : {step, -step, 0.25 * step, -0.25 * step}) {
        auto d = delta;
        d[m] += trial;
        try {
          auto f = build(d);
          const double v = cost(f);
          if (v < best.value) {
            best = {std::move(f), v};
            delta = std::move(d);
            break;
          }
        } catch (const DomainError&) {
          // not monotone
        }
      }
    }
  }
  return best;
}

}  // namespace

double J_objective(const LagrangianState& a, const LagrangianState& b, const Relabeling& f1, const Relabeling& f2) {
  require_same_grid(a, b);
  return norm_E_diff(relabel(a, f1), b) + norm_E_diff(a, relabel(b, f2));
}

MetricEstimate J_upper(const LagrangianState& a, const LagrangianState& b, const MetricOptions& opts) {
  require_same_grid(a, b);
  MetricEstimate est;
  est.lower = 0.5 * norm_Linf_diff(a, b);
  auto t1 = best_relabeling(a, b, opts);
  auto t2 = best_relabeling(b, a, opts);
  est.upper = t1.value + t2.value;
  est.witness_f1 = std::move(t1.f);
  est.witness_f2 = std::move(t2.f);
  return est;
}

LagrangianState metric_midpoint(const LagrangianState& a, const LagrangianState& b) {
  require_same_grid(a, b);
  const auto n = a.size();
  LagrangianState m = LagrangianState::ground(a.grid);
  const double ymax = std::max(*std::max_element(a.yxi.begin(), a.yxi.end()),
                               *std::max_element(b.yxi.begin(), b.yxi.end()));
  const double eps = 1e-10 * ymax;
  for (std::size_t i = 0; i < n; ++i) {
    m.y[i] = 0.5 * (a.y[i] + b.y[i]);
    m.U[i] = 0.5 * (a.U[i] + b.U[i]);
    m.yxi[i] = 0.5 * (a.yxi[i] + b.yxi[i]);
    if (m.yxi[i] > eps) {
      m.Uxi[i] = 0.5 * (a.Uxi[i] + b.Uxi[i]);
      m.r[i] = 0.5 * (a.r[i] + b.r[i]);
      m.hxi[i] = (m.yxi[i] * m.yxi[i] * m.U[i] * m.U[i] + m.Uxi[i] * m.Uxi[i] + m.r[i] * m.r[i]) / m.yxi[i];
    } else {
      m.yxi[i] = 0.0;
      m.hxi[i] = 0.5 * (a.hxi[i] + b.hxi[i]);
    }
  }
  const auto H = cumulative_trapezoid(m.hxi, a.grid->dxi());
  const double H0 = 0.5 * (a.H.front() + b.H.front());
  for (std::size_t i = 0; i < n; ++i) m.H[i] = H0 + H[i];
  return project_F0(m);
}

MetricEstimate dM_estimate(const LagrangianState& a, const LagrangianState& b, double M, std::size_t chain_length,
                           const MetricOptions& opts) {
  require_same_grid(a, b);
  for (const auto* X : {&a, &b}) {
    const auto rep = check_in_G(*X, 1e-8);
    if (rep.f0_residual > 1e-8) throw DomainError("dM_estimate: state is not in F_0");
    if (!rep.in_FM(M)) throw DomainError("dM_estimate: ||H||_inf exceeds M");
  }
  auto best = J_upper(a, b, opts);
  if (chain_length >= 2 && best.upper > 0.0) {
    try {
      auto mid = metric_midpoint(a, b);
      if (sup_norm(mid.H) <= M) {
        auto j1 = J_upper(a, mid, opts);
        auto j2 = J_upper(mid, b, opts);
        if (j1.upper + j2.upper < best.upper) {
          best.upper = j1.upper + j2.upper;
          best.chain = {std::move(mid)};
          best.chain_length = 2;
          best.witness_f1 = std::move(j1.witness_f1);
          best.witness_f2 = std::move(j2.witness_f2);
        }
      }
    } catch (const DomainError&) {
      // midpoint outside F: the direct estimate stands
    }
  }
  best.lower = 0.5 * norm_Linf_diff(a, b);
  return best;
}

MetricEstimate d_DM(const EulerianState& a, const EulerianState& b, double M, GridPtr lagrangian_grid,
                    std::size_t chain_length, const MetricOptions& opts) {
  for (const auto* z : {&a, &b})
    if (total_energy(z->mu) > M) throw DomainError("d_DM: total energy exceeds M");
  const auto Xa = to_lagrangian(a, lagrangian_grid);
  const auto Xb = to_lagrangian(b, lagrangian_grid);
  return dM_estimate(Xa, Xb, M, chain_length, opts);
}

std::vector<double> r_separation(const LagrangianState& X) {
  X.validate_shape();
  std::vector<double> f(X.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = X.r[i] * std::exp(-std::abs(X.grid->node(i)));
  return cumulative_trapezoid(f, X.grid->dxi());
}

}  // namespace chsys
