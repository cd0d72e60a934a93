#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fluoinv {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/**
 * Uniform node-centred grid on the unit interval (dim 1) or the unit square
 * (dim 2). Nodes sit at i/N (and j/N); node index is j*(N+1)+i.
 *
 * Immutable after construction; share it through GridPtr.
 */
class Grid {
public:
  Grid(int dim, int cells_per_side);

  int dim() const noexcept { return dim_; }
  int cells_per_side() const noexcept { return cells_; }
  int nodes_per_side() const noexcept { return cells_ + 1; }
  double spacing() const noexcept { return h_; }
  std::size_t node_count() const noexcept { return node_count_; }

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(cells_ + 1) + static_cast<std::size_t>(i);
  }
  int ix(std::size_t node) const noexcept { return static_cast<int>(node % static_cast<std::size_t>(cells_ + 1)); }
  int iy(std::size_t node) const noexcept {
    return dim_ == 1 ? 0 : static_cast<int>(node / static_cast<std::size_t>(cells_ + 1));
  }

  Point coordinate(std::size_t node) const noexcept { return coords_[node]; }
  bool is_boundary(std::size_t node) const noexcept { return boundary_flag_[node] != 0; }
  std::span<const std::size_t> boundary_nodes() const noexcept { return boundary_; }
  std::span<const std::size_t> interior_nodes() const noexcept { return interior_; }

  /// Unit outward normal at a boundary node; corners get the normalised
  /// diagonal. Zero vector for interior nodes.
  Point outward_normal(std::size_t node) const noexcept;

  bool same_shape(const Grid& other) const noexcept {
    return dim_ == other.dim_ && cells_ == other.cells_;
  }

private:
  int dim_;
  int cells_;
  double h_;
  std::size_t node_count_;
  std::vector<Point> coords_;
  std::vector<unsigned char> boundary_flag_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, int cells_per_side);

/// Nodal values of a scalar field on a grid.
class GridFunction {
public:
  GridFunction() = default;
  explicit GridFunction(GridPtr grid, double fill = 0.0);
  GridFunction(GridPtr grid, std::vector<double> values);

  static GridFunction from(GridPtr grid, const std::function<double(Point)>& f);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Grid& grid() const noexcept { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>& storage() noexcept { return values_; }

  double min() const;
  double max() const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s) noexcept;

  /// Throws std::invalid_argument unless both live on the same grid shape.
  void require_same_grid(const GridFunction& other) const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);
GridFunction pointwise_multiply(const GridFunction& a, const GridFunction& b);
/// a / b nodewise; throws std::domain_error if some b value is zero.
GridFunction pointwise_divide(const GridFunction& a, const GridFunction& b);

}  // namespace fluoinv
