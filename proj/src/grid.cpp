#include "fluoinv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fluoinv {

Grid::Grid(int dim, int cells_per_side) : dim_(dim), cells_(cells_per_side) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (cells_per_side < 4)
    throw std::invalid_argument("Grid: cells_per_side must be >= 4, got " + std::to_string(cells_per_side));
  h_ = 1.0 / static_cast<double>(cells_);
  const std::size_t side = static_cast<std::size_t>(cells_ + 1);
  node_count_ = dim_ == 1 ? side : side * side;
  coords_.resize(node_count_);
  boundary_flag_.assign(node_count_, 0);
  for (std::size_t n = 0; n < node_count_; ++n) {
    const int i = ix(n);
    const int j = iy(n);
    coords_[n] = {static_cast<double>(i) / cells_, dim_ == 1 ? 0.0 : static_cast<double>(j) / cells_};
    const bool edge_x = (i == 0 || i == cells_);
    const bool edge_y = dim_ == 2 && (j == 0 || j == cells_);
    if (edge_x || edge_y) {
      boundary_flag_[n] = 1;
      boundary_.push_back(n);
    } else {
      interior_.push_back(n);
    }
  }
}

Point Grid::outward_normal(std::size_t node) const noexcept {
  if (!is_boundary(node)) return {};
  const int i = ix(node);
  const int j = iy(node);
  double nx = 0.0;
  double ny = 0.0;
  if (i == 0) nx = -1.0;
  if (i == cells_) nx = 1.0;
  if (dim_ == 2) {
    if (j == 0) ny = -1.0;
    if (j == cells_) ny = 1.0;
  }
  const double len = std::hypot(nx, ny);
  return {nx / len, ny / len};
}

GridPtr make_grid(int dim, int cells_per_side) { return std::make_shared<const Grid>(dim, cells_per_side); }

GridFunction::GridFunction(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("GridFunction: null grid");
  values_.assign(grid_->node_count(), fill);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("GridFunction: null grid");
  if (values_.size() != grid_->node_count())
    throw std::invalid_argument("GridFunction: expected " + std::to_string(grid_->node_count()) + " values, got " +
                                std::to_string(values_.size()));
}

GridFunction GridFunction::from(GridPtr grid, const std::function<double(Point)>& f) {
  GridFunction out(grid);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = f(grid->coordinate(n));
  return out;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

void GridFunction::require_same_grid(const GridFunction& other) const {
  if (!grid_ || !other.grid_ || !(grid_ == other.grid_ || grid_->same_shape(*other.grid_)))
    throw std::invalid_argument("GridFunction: operands live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

GridFunction pointwise_multiply(const GridFunction& a, const GridFunction& b) {
  a.require_same_grid(b);
  GridFunction out(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

GridFunction pointwise_divide(const GridFunction& a, const GridFunction& b) {
  a.require_same_grid(b);
  GridFunction out(a.grid_ptr());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] == 0.0) throw std::domain_error("pointwise_divide: zero divisor at node " + std::to_string(i));
    out[i] = a[i] / b[i];
  }
  return out;
}

}  // namespace fluoinv
