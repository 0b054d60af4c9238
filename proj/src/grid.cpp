#include "chsys/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chsys/errors.hpp"

namespace chsys {

Grid::Grid(double xi_min, double xi_max, std::size_t n)
    : xi_min_(xi_min), xi_max_(xi_max), dxi_((xi_max - xi_min) / static_cast<double>(n - 1)) {
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) nodes_[i] = xi_min + static_cast<double>(i) * dxi_;
  nodes_.back() = xi_max;
}

GridPtr Grid::make(double xi_min, double xi_max, std::size_t n) {
  if (n < 3) throw DomainError("grid needs at least 3 nodes, got " + std::to_string(n));
  if (!std::isfinite(xi_min) || !std::isfinite(xi_max) || !(xi_max > xi_min))
    throw DomainError("grid bounds must be finite with xi_min < xi_max");
  return GridPtr(new Grid(xi_min, xi_max, n));
}

GridPtr Grid::anchored(double anchor, std::size_t anchor_index, double h, std::size_t n) {
  if (anchor_index >= n) throw DomainError("anchor index outside grid");
  const double lo = anchor - static_cast<double>(anchor_index) * h;
  return make(lo, lo + static_cast<double>(n - 1) * h, n);
}

GridPtr Grid::cell_centered(double anchor, std::size_t cell_index, double h, std::size_t n) {
  if (cell_index + 1 >= n) throw DomainError("cell index outside grid");
  const double lo = anchor - (static_cast<double>(cell_index) + 0.5) * h;
  return make(lo, lo + static_cast<double>(n - 1) * h, n);
}

std::size_t Grid::cell_of(double x) const noexcept {
  const double s = (x - xi_min_) / dxi_;
  if (!(s > 0.0)) return 0;
  const auto last = size() - 2;
  if (s >= static_cast<double>(last)) return last;
  auto j = static_cast<std::size_t>(s);
  // floor may land one cell off when x sits on a node up to rounding
  if (j < last && x >= nodes_[j + 1]) ++j;
  if (j > 0 && x < nodes_[j]) --j;
  return j;
}

bool same_grid(const GridPtr& a, const GridPtr& b) noexcept {
  return a && b && (a == b || *a == *b);
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

double l2_norm(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i] * f[i];
  return std::sqrt(s * h);
}

double sup_norm(std::span<const double> f) {
  double m = 0.0;
  for (double v : f) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw StructuralError("sup_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double interpolate(const Grid& grid, std::span<const double> values, double x) {
  if (x <= grid.xi_min()) return values.front();
  if (x >= grid.xi_max()) return values.back();
  const auto j = grid.cell_of(x);
  const double t = (x - grid.node(j)) / grid.dxi();
  return values[j] + t * (values[j + 1] - values[j]);
}

std::vector<double> trapezoid_weights(const Grid& grid) {
  std::vector<double> w(grid.size(), grid.dxi());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace chsys
