#include "chsys/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chsys/errors.hpp"

namespace chsys {

LagrangianState LagrangianState::ground(GridPtr grid) {
  const auto n = grid->size();
  LagrangianState X;
  X.y.assign(grid->nodes().begin(), grid->nodes().end());
  X.U.assign(n, 0.0);
  X.H.assign(n, 0.0);
  X.r.assign(n, 0.0);
  X.yxi.assign(n, 1.0);
  X.Uxi.assign(n, 0.0);
  X.hxi.assign(n, 0.0);
  X.grid = std::move(grid);
  return X;
}

std::vector<double> LagrangianState::zeta() const {
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] - grid->node(i);
  return z;
}

void LagrangianState::validate_shape() const {
  if (!grid) throw StructuralError("Lagrangian state has no grid");
  const auto n = grid->size();
  const std::vector<double>* fields[] = {&y, &U, &H, &r, &yxi, &Uxi, &hxi};
  const char* names[] = {"y", "U", "H", "r", "yxi", "Uxi", "hxi"};
  for (std::size_t k = 0; k < 7; ++k) {
    if (fields[k]->size() != n)
      throw StructuralError(std::string("field ") + names[k] + " has " +
                            std::to_string(fields[k]->size()) + " samples, grid has " +
                            std::to_string(n));
  }
}

double lagcoord3_residual(const LagrangianState& X) {
  double m = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double lhs = X.yxi[i] * X.hxi[i];
    const double rhs = X.yxi[i] * X.yxi[i] * X.U[i] * X.U[i] + X.Uxi[i] * X.Uxi[i] + X.r[i] * X.r[i];
    m = std::max(m, std::abs(lhs - rhs));
  }
  return m;
}

namespace {

double consistency(std::span<const double> primary, std::span<const double> derivative, double h) {
  const auto integral = cumulative_trapezoid(derivative, h);
  double m = 0.0;
  for (std::size_t i = 0; i < primary.size(); ++i)
    m = std::max(m, std::abs(primary[i] - primary[0] - integral[i]));
  return m;
}

// Norms from the displacement fields (zeta, U, H, r) and (zeta_xi, U_xi, H_xi).
struct Fields {
  std::vector<double> zeta, U, H, r, zxi, Uxi, hxi;
};

Fields displacement(const LagrangianState& X) {
  Fields f{X.zeta(), X.U, X.H, X.r, X.yxi, X.Uxi, X.hxi};
  for (double& v : f.zxi) v -= 1.0;
  return f;
}

Fields difference(const LagrangianState& a, const LagrangianState& b) {
  a.validate_shape();
  b.validate_shape();
  if (!same_grid(a.grid, b.grid)) throw StructuralError("states live on different grids");
  auto sub = [](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> d(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) d[i] = p[i] - q[i];
    return d;
  };
  return Fields{sub(a.y, b.y), sub(a.U, b.U), sub(a.H, b.H), sub(a.r, b.r),
                sub(a.yxi, b.yxi), sub(a.Uxi, b.Uxi), sub(a.hxi, b.hxi)};
}

double e_norm(const Fields& f, double h) {
  return sup_norm(f.zeta) + l2_norm(f.zxi, h) + l2_norm(f.U, h) + l2_norm(f.Uxi, h) + sup_norm(f.H) +
         l2_norm(f.hxi, h) + l2_norm(f.r, h);
}

double linf_norm(const Fields& f) { return sup_norm(f.zeta) + sup_norm(f.U) + sup_norm(f.H); }

}  // namespace

double norm_E(const LagrangianState& X) {
  X.validate_shape();
  return e_norm(displacement(X), X.grid->dxi());
}

double norm_Linf(const LagrangianState& X) {
  X.validate_shape();
  return linf_norm(displacement(X));
}

double norm_xi_L2(const LagrangianState& X) {
  X.validate_shape();
  const auto f = displacement(X);
  const double h = X.grid->dxi();
  return l2_norm(f.zxi, h) + l2_norm(f.Uxi, h) + l2_norm(f.hxi, h) + l2_norm(f.r, h);
}

double norm_xi_Linf(const LagrangianState& X) {
  X.validate_shape();
  const auto f = displacement(X);
  return sup_norm(f.zxi) + sup_norm(f.Uxi) + sup_norm(f.hxi) + sup_norm(f.r);
}

double norm_E_diff(const LagrangianState& a, const LagrangianState& b) {
  return e_norm(difference(a, b), a.grid->dxi());
}

double norm_Linf_diff(const LagrangianState& a, const LagrangianState& b) {
  return linf_norm(difference(a, b));
}

double sup_diff_all(const LagrangianState& a, const LagrangianState& b) {
  const auto d = difference(a, b);
  return std::max({sup_norm(d.zeta), sup_norm(d.U), sup_norm(d.H), sup_norm(d.r), sup_norm(d.zxi),
                   sup_norm(d.Uxi), sup_norm(d.hxi)});
}

ConstraintReport check_in_G(const LagrangianState& X, const Tolerances& tol) {
  X.validate_shape();
  const auto n = X.size();
  const double h = X.grid->dxi();
  ConstraintReport rep;
  rep.min_sum_yxi_hxi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    rep.max_negative_yxi = std::max(rep.max_negative_yxi, -X.yxi[i]);
    rep.max_negative_hxi = std::max(rep.max_negative_hxi, -X.hxi[i]);
    rep.min_sum_yxi_hxi = std::min(rep.min_sum_yxi_hxi, X.yxi[i] + X.hxi[i]);
    if (i + 1 < n) rep.h_monotonicity_violation = std::max(rep.h_monotonicity_violation, X.H[i] - X.H[i + 1]);
    rep.f0_residual = std::max(rep.f0_residual, std::abs(X.y[i] + X.H[i] - X.grid->node(i)));
    rep.h_sup = std::max(rep.h_sup, std::abs(X.H[i]));
  }
  rep.max_lagcoord3_residual = lagcoord3_residual(X);
  rep.left_decay = std::abs(X.H.front());
  rep.consistency_residual = std::max({consistency(X.y, X.yxi, h), consistency(X.U, X.Uxi, h),
                                       consistency(X.H, X.hxi, h)});
  rep.norm_E = norm_E(X);

  const double tol_consistency = tol.consistency < 0.0 ? h : tol.consistency;
  rep.in_G = rep.max_negative_yxi <= tol.constraint && rep.max_negative_hxi <= tol.constraint &&
             rep.min_sum_yxi_hxi > 0.0 && rep.max_lagcoord3_residual <= tol.constraint &&
             rep.h_monotonicity_violation <= tol.constraint && rep.left_decay <= tol.decay &&
             rep.consistency_residual <= tol_consistency;
  rep.in_F0 = rep.in_G && rep.f0_residual <= tol.constraint;
  return rep;
}

ConstraintReport check_in_G(const LagrangianState& X, double tol) {
  Tolerances t;
  t.constraint = tol;
  t.decay = tol;
  return check_in_G(X, t);
}

// ---------------------------------------------------------------------------
// Generalized inverse

std::vector<double> invert_monotone_at(const Grid& source, std::span<const double> w,
                                       std::span<const double> points, double tol) {
  const auto n = source.size();
  if (w.size() != n) throw StructuralError("invert_monotone: w does not match its grid");
  std::vector<double> wm(w.begin(), w.end());
  for (std::size_t i = 1; i < n; ++i) {
    if (wm[i] < wm[i - 1] - tol)
      throw DomainError("invert_monotone: map decreases at node " + std::to_string(i));
    wm[i] = std::max(wm[i], wm[i - 1]);
  }
  const double h = source.dxi();
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double x = points[k];
    if (x <= wm.front()) {
      out[k] = source.xi_min() + (x - wm.front());
    } else if (x > wm.back()) {
      out[k] = source.xi_max() + (x - wm.back());
    } else {
      const auto it = std::lower_bound(wm.begin(), wm.end(), x);
      const auto j = static_cast<std::size_t>(it - wm.begin()) - 1;
      out[k] = source.node(j) + h * (x - wm[j]) / (wm[j + 1] - wm[j]);
    }
  }
  return out;
}

std::vector<double> invert_monotone_hermite_at(const Grid& source, std::span<const double> w,
                                               std::span<const double> dw, std::span<const double> points,
                                               double tol) {
  const auto n = source.size();
  if (dw.size() != n) throw StructuralError("invert_monotone: dw does not match its grid");
  // linear inverse first: it picks the cell and serves flat cells and the far field
  auto out = invert_monotone_at(source, w, points, tol);
  const double h = source.dxi();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double x = points[k];
    if (!(x > w.front() && x <= w.back())) continue;
    const std::size_t j = std::min(source.cell_of(out[k]), n - 2);
    const double w0 = w[j], w1 = w[j + 1];
    const double delta = (w1 - w0) / h;
    if (!(delta > 0.0) || x < w0 || x > w1) continue;
    // Fritsch-Carlson limited slopes keep the cubic monotone on the cell
    double a = std::max(0.0, dw[j]) / delta, b = std::max(0.0, dw[j + 1]) / delta;
    const double rr = a * a + b * b;
    if (rr > 9.0) {
      const double tau = 3.0 / std::sqrt(rr);
      a *= tau;
      b *= tau;
    }
    const double m0 = a * delta * h, m1 = b * delta * h, dv = w1 - w0;
    auto p = [&](double t) {
      const double t2 = t * t, t3 = t2 * t;
      return w0 + (3.0 * t2 - 2.0 * t3) * dv + (t3 - 2.0 * t2 + t) * m0 + (t3 - t2) * m1;
    };
    auto dp = [&](double t) {
      const double t2 = t * t;
      return (6.0 * t - 6.0 * t2) * dv + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1;
    };
    double lo = 0.0, hi = 1.0;
    double t = std::clamp((out[k] - source.node(j)) / h, 0.0, 1.0);
    for (int it = 0; it < 60; ++it) {
      const double r = p(t) - x;
      if (r == 0.0) break;
      (r < 0.0 ? lo : hi) = t;
      const double d = dp(t);
      double next = d > 0.0 ? t - r / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-15) {
        t = next;
        break;
      }
      t = next;
    }
    out[k] = source.node(j) + h * t;
  }
  return out;
}

std::vector<double> invert_monotone(const Grid& source, std::span<const double> w,
                                    const Grid& target, double tol) {
  return invert_monotone_at(source, w, target.nodes(), tol);
}

// ---------------------------------------------------------------------------
// Relabeling

Relabeling Relabeling::identity(GridPtr grid) {
  std::vector<double> f(grid->nodes().begin(), grid->nodes().end());
  return Relabeling(std::move(grid), std::move(f));
}

Relabeling Relabeling::from_values(GridPtr grid, std::vector<double> values) {
  if (values.size() != grid->size()) throw StructuralError("relabeling does not match its grid");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i + 1] > values[i]))
      throw DomainError("relabeling is not strictly increasing at node " + std::to_string(i));
  }
  return Relabeling(std::move(grid), std::move(values));
}

double Relabeling::operator()(double x) const {
  const auto& g = *grid_;
  if (x <= g.xi_min()) return x + (f_.front() - g.xi_min());
  if (x >= g.xi_max()) return x + (f_.back() - g.xi_max());
  return interpolate(g, f_, x);
}

double Relabeling::cell_slope(std::size_t j) const { return (f_[j + 1] - f_[j]) / grid_->dxi(); }

double Relabeling::node_slope(std::size_t i) const {
  const auto n = f_.size();
  if (i == 0) return cell_slope(0);
  if (i + 1 == n) return cell_slope(n - 2);
  return 0.5 * (cell_slope(i - 1) + cell_slope(i));
}

Relabeling Relabeling::inverse() const {
  return Relabeling(grid_, invert_monotone(*grid_, f_, *grid_));
}

Relabeling Relabeling::compose(const Relabeling& g) const {
  if (!same_grid(grid_, g.grid_)) throw StructuralError("relabelings live on different grids");
  std::vector<double> out(f_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(g.f_[i]);
  return from_values(grid_, std::move(out));
}

namespace {
double w1inf_distance_to_id(const Relabeling& f) {
  double sup = 0.0, slope = 0.0;
  const auto& g = *f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, std::abs(f.values()[i] - g.node(i)));
  for (std::size_t j = 0; j + 1 < g.size(); ++j) slope = std::max(slope, std::abs(f.cell_slope(j) - 1.0));
  return sup + slope;
}
}  // namespace

double Relabeling::kappa() const { return w1inf_distance_to_id(*this) + w1inf_distance_to_id(inverse()); }

// ---------------------------------------------------------------------------
// Composition X o f

namespace {

LagrangianState compose_fields(const LagrangianState& X, std::span<const double> at,
                               std::span<const double> slope) {
  const auto& g = *X.grid;
  const auto zeta = X.zeta();
  LagrangianState out;
  out.grid = X.grid;
  const auto n = g.size();
  for (auto* v : {&out.y, &out.U, &out.H, &out.r, &out.yxi, &out.Uxi, &out.hxi}) v->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = at[i];
    const double s = slope[i];
    out.y[i] = p + interpolate(g, zeta, p);
    out.U[i] = interpolate(g, X.U, p);
    out.H[i] = interpolate(g, X.H, p);
    out.r[i] = interpolate(g, X.r, p) * s;
    out.yxi[i] = interpolate(g, X.yxi, p) * s;
    out.Uxi[i] = interpolate(g, X.Uxi, p) * s;
    out.hxi[i] = interpolate(g, X.hxi, p) * s;
  }
  return out;
}

}  // namespace

LagrangianState relabel(const LagrangianState& X, const Relabeling& f) {
  X.validate_shape();
  if (!same_grid(X.grid, f.grid())) throw StructuralError("relabeling lives on a different grid");
  const auto nodes = X.grid->nodes();
  if (std::equal(nodes.begin(), nodes.end(), f.values().begin())) return X;
  std::vector<double> slope(X.size());
  for (std::size_t i = 0; i < slope.size(); ++i) slope[i] = f.node_slope(i);
  return compose_fields(X, f.values(), slope);
}

LagrangianState project_F0(const LagrangianState& X) {
  X.validate_shape();
  const auto& g = *X.grid;
  std::vector<double> w(X.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = X.y[i] + X.H[i];
  const auto eta = invert_monotone(g, w, g, 1e-10);
  std::vector<double> slope(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double dw = interpolate(g, X.yxi, eta[i]) + interpolate(g, X.hxi, eta[i]);
    if (!(dw > 0.0)) throw DomainError("project_F0: y_xi + H_xi vanishes at node " + std::to_string(i));
    slope[i] = 1.0 / dw;
  }
  return compose_fields(X, eta, slope);
}

}  // namespace chsys
