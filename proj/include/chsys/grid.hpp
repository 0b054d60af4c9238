#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace chsys {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform grid on [xi_min, xi_max] with n >= 3 nodes. Immutable; states share it through GridPtr.
class Grid {
 public:
  static GridPtr make(double xi_min, double xi_max, std::size_t n);

  /// Grid of n nodes with spacing h such that `anchor` is node `anchor_index`.
  static GridPtr anchored(double anchor, std::size_t anchor_index, double h, std::size_t n);

  /// Grid of n nodes with spacing h such that `anchor` is the midpoint of cell `cell_index`.
  static GridPtr cell_centered(double anchor, std::size_t cell_index, double h, std::size_t n);

  double xi_min() const noexcept { return xi_min_; }
  double xi_max() const noexcept { return xi_max_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double dxi() const noexcept { return dxi_; }
  double node(std::size_t i) const noexcept { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Index of the cell [node(j), node(j+1)] containing x, clamped to [0, n-2].
  std::size_t cell_of(double x) const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return xi_min_ == other.xi_min_ && xi_max_ == other.xi_max_ && size() == other.size();
  }

 private:
  Grid(double xi_min, double xi_max, std::size_t n);

  double xi_min_;
  double xi_max_;
  double dxi_;
  std::vector<double> nodes_;
};

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept;

// Quadrature and interpolation on uniform grids. Trapezoid rule throughout.

double trapezoid(std::span<const double> f, double h);
std::vector<double> cumulative_trapezoid(std::span<const double> f, double h);
double l2_norm(std::span<const double> f, double h);
double sup_norm(std::span<const double> f);
double sup_diff(std::span<const double> a, std::span<const double> b);

/// Piecewise-linear interpolant of nodal values at x; constant extrapolation outside the grid.
double interpolate(const Grid& grid, std::span<const double> values, double x);

/// Trapezoid weights (h/2 at the ends, h inside).
std::vector<double> trapezoid_weights(const Grid& grid);

}  // namespace chsys
