#pragma once

#include <span>
#include <vector>

#include "chsys/grid.hpp"

namespace chsys {

/// Lagrangian state X = (y, U, H, r) sampled on a fixed xi-grid, together with the
/// independently carried derivative fields y_xi, U_xi, H_xi.
///
/// Derivative fields hold the right-limit value at each node: at a node where a
/// plateau of y starts, yxi = 0 and hxi = H_xi on the plateau.
struct LagrangianState {
  GridPtr grid;
  std::vector<double> y;
  std::vector<double> U;
  std::vector<double> H;
  std::vector<double> r;
  std::vector<double> yxi;
  std::vector<double> Uxi;
  std::vector<double> hxi;

  /// y = id, everything else zero, yxi = 1.
  static LagrangianState ground(GridPtr grid);

  std::size_t size() const noexcept { return y.size(); }

  /// zeta = y - id.
  std::vector<double> zeta() const;

  /// Throws StructuralError if a field length differs from the grid size.
  void validate_shape() const;
};

struct Tolerances {
  double constraint = 1e-8;   // sign conditions, y_xi H_xi identity, H monotone
  double decay = 1e-8;        // H at the left boundary
  double consistency = -1.0;  // stored derivatives vs primary samples; < 0 means "dxi"
};

/// Residuals of the membership conditions of the constraint set G and its subsets.
struct ConstraintReport {
  double max_negative_yxi = 0.0;
  double max_negative_hxi = 0.0;
  double min_sum_yxi_hxi = 0.0;
  double max_lagcoord3_residual = 0.0;
  double h_monotonicity_violation = 0.0;
  double left_decay = 0.0;
  double consistency_residual = 0.0;
  double f0_residual = 0.0;  // max |y + H - id|
  double h_sup = 0.0;
  double norm_E = 0.0;
  bool in_G = false;
  bool in_F0 = false;

  /// Total energy bounded by M, i.e. ||H||_inf <= M.
  bool in_FM(double M) const noexcept { return h_sup <= M; }
  /// E-norm ball of radius M.
  bool in_BM(double M) const noexcept { return norm_E <= M; }
};

ConstraintReport check_in_G(const LagrangianState& X, const Tolerances& tol);
ConstraintReport check_in_G(const LagrangianState& X, double tol);

/// Pointwise residual |yxi hxi - (yxi^2 U^2 + Uxi^2 + r^2)|.
double lagcoord3_residual(const LagrangianState& X);

// Norms. L2 parts use trapezoid quadrature on the state's grid.

/// ||zeta||_V + ||U||_{H^1} + ||H||_V + ||r||_{L^2}, with ||U||_{H^1} = ||U||_2 + ||U_xi||_2.
double norm_E(const LagrangianState& X);
/// ||y - id||_inf + ||U||_inf + ||H||_inf.
double norm_Linf(const LagrangianState& X);
/// ||y_xi - 1||_2 + ||U_xi||_2 + ||H_xi||_2 + ||r||_2.
double norm_xi_L2(const LagrangianState& X);
/// ||y_xi - 1||_inf + ||U_xi||_inf + ||H_xi||_inf + ||r||_inf.
double norm_xi_Linf(const LagrangianState& X);

/// The same norms applied to the difference X_a - X_b (both on the same grid).
double norm_E_diff(const LagrangianState& a, const LagrangianState& b);
double norm_Linf_diff(const LagrangianState& a, const LagrangianState& b);
/// Sup-norm over all seven fields of the difference.
double sup_diff_all(const LagrangianState& a, const LagrangianState& b);

/// Relabeling function f in G, piecewise linear with knots at the grid nodes.
/// Outside the grid f - id is extended by its boundary values.
class Relabeling {
 public:
  static Relabeling identity(GridPtr grid);
  /// Throws DomainError unless values are strictly increasing.
  static Relabeling from_values(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return f_; }
  double operator()(double x) const;

  /// Slope on cell [node(j), node(j+1)].
  double cell_slope(std::size_t j) const;
  /// Nodal derivative: mean of the two adjacent cell slopes (one-sided at the ends).
  double node_slope(std::size_t i) const;

  Relabeling inverse() const;
  /// (*this) o g, sampled at the nodes.
  Relabeling compose(const Relabeling& g) const;

  /// ||f - id||_{W^{1,inf}} + ||f^{-1} - id||_{W^{1,inf}}.
  double kappa() const;
  bool in_G_kappa(double kappa_max) const { return kappa() <= kappa_max; }

 private:
  Relabeling(GridPtr grid, std::vector<double> f) : grid_(std::move(grid)), f_(std::move(f)) {}

  GridPtr grid_;
  std::vector<double> f_;
};

/// X o f: primary fields composed by linear interpolation, density fields
/// (y_xi, U_xi, H_xi, r) as (field o f) * f_xi.
LagrangianState relabel(const LagrangianState& X, const Relabeling& f);

/// Pi(X) = X o (y + H)^{-1}. The result satisfies y + H = id at the nodes and
/// yxi + hxi = 1.
LagrangianState project_F0(const LagrangianState& X);

/// Left-continuous generalized inverse x -> sup{xi : w(xi) < x} of the piecewise-linear
/// interpolant of `w` on `source`, evaluated at the nodes of `target`. Outside the
/// source grid, w - id is extended by its boundary values.
std::vector<double> invert_monotone(const Grid& source, std::span<const double> w,
                                    const Grid& target, double tol = 1e-12);

/// Same inverse evaluated at arbitrary points.
std::vector<double> invert_monotone_at(const Grid& source, std::span<const double> w,
                                       std::span<const double> points, double tol = 1e-12);

/// Inverse of the monotone cubic Hermite interpolant built from w and its derivative samples dw
/// (slopes limited so that every cell stays monotone). Fourth order where w is smooth; flat
/// cells and points outside the range of w fall back to invert_monotone_at.
std::vector<double> invert_monotone_hermite_at(const Grid& source, std::span<const double> w,
                                               std::span<const double> dw, std::span<const double> points,
                                               double tol = 1e-12);

}  // namespace chsys
