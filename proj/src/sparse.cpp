#include "fluoinv/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fluoinv {

SparseOperator::SparseOperator(std::size_t n, std::vector<Triplet> entries, bool symmetric)
    : n_(n), symmetric_(symmetric) {
  for (const auto& t : entries)
    if (t.row >= n || t.col >= n) throw std::out_of_range("SparseOperator: entry outside " + std::to_string(n));
  std::sort(entries.begin(), entries.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    const std::size_t r = entries[k].row;
    const std::size_t c = entries[k].col;
    double v = 0.0;
    while (k < entries.size() && entries[k].row == r && entries[k].col == c) v += entries[k++].value;
    col_idx_.push_back(c);
    values_.push_back(v);
    ++row_ptr_[r + 1];
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

SparseOperator SparseOperator::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return SparseOperator(diag.size(), std::move(t), true);
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("SparseOperator::apply: size mismatch");
  kernels::spmv(view(), x, y);
}

GridFunction SparseOperator::apply(const GridFunction& x) const {
  GridFunction y(x.grid_ptr());
  apply(x.values(), y.values());
  return y;
}

double SparseOperator::entry(std::size_t row, std::size_t col) const noexcept {
  if (row >= n_) return 0.0;
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> SparseOperator::diagonal_values() const {
  std::vector<double> d(n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) d[r] = entry(r, r);
  return d;
}

double SparseOperator::symmetry_defect() const {
  double scale = 0.0;
  double defect = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      scale = std::max(scale, std::abs(values_[k]));
      defect = std::max(defect, std::abs(values_[k] - entry(col_idx_[k], r)));
    }
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

Stencil1D stencil_1d(int cells, double beta) {
  const double h = 1.0 / static_cast<double>(cells);
  const std::size_t side = static_cast<std::size_t>(cells + 1);
  Stencil1D s;
  s.diag.assign(side, 2.0 / h);
  s.off.assign(side - 1, -1.0 / h);
  s.mass.assign(side, h);
  s.mass.front() = s.mass.back() = 0.5 * h;
  // Ghost-node elimination of beta u' + u = b: the half-cell row picks up
  // (u_0 - u_1)/h + u_0/beta.
  const double robin = beta > 0.0 ? 1.0 / beta : 0.0;
  s.diag.front() = 1.0 / h + robin;
  s.diag.back() = 1.0 / h + robin;
  return s;
}

std::vector<double> mass_weights(const Grid& grid) {
  const auto s = stencil_1d(grid.cells_per_side(), 0.0);
  std::vector<double> w(grid.node_count());
  for (std::size_t n = 0; n < w.size(); ++n)
    w[n] = grid.dim() == 1 ? s.mass[grid.ix(n)] : s.mass[grid.ix(n)] * s.mass[grid.iy(n)];
  return w;
}

SparseOperator assemble_mass(const Grid& grid) {
  const auto w = mass_weights(grid);
  return SparseOperator::diagonal(w);
}

namespace {

SparseOperator tensor_stiffness(const Grid& grid, const Stencil1D& s) {
  std::vector<Triplet> t;
  const int N = grid.cells_per_side();
  t.reserve(grid.node_count() * (grid.dim() == 1 ? 3 : 5));
  if (grid.dim() == 1) {
    for (int i = 0; i <= N; ++i) {
      const auto n = grid.index(i);
      t.push_back({n, n, s.diag[i]});
      if (i > 0) t.push_back({n, grid.index(i - 1), s.off[i - 1]});
      if (i < N) t.push_back({n, grid.index(i + 1), s.off[i]});
    }
  } else {
    for (int j = 0; j <= N; ++j) {
      for (int i = 0; i <= N; ++i) {
        const auto n = grid.index(i, j);
        t.push_back({n, n, s.diag[i] * s.mass[j] + s.mass[i] * s.diag[j]});
        if (i > 0) t.push_back({n, grid.index(i - 1, j), s.off[i - 1] * s.mass[j]});
        if (i < N) t.push_back({n, grid.index(i + 1, j), s.off[i] * s.mass[j]});
        if (j > 0) t.push_back({n, grid.index(i, j - 1), s.mass[i] * s.off[j - 1]});
        if (j < N) t.push_back({n, grid.index(i, j + 1), s.mass[i] * s.off[j]});
      }
    }
  }
  return SparseOperator(grid.node_count(), std::move(t), true);
}

}  // namespace

SparseOperator assemble_laplacian(const Grid& grid, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("assemble_laplacian: beta must be positive");
  return tensor_stiffness(grid, stencil_1d(grid.cells_per_side(), beta));
}

SparseOperator assemble_neumann_stiffness(const Grid& grid) {
  return tensor_stiffness(grid, stencil_1d(grid.cells_per_side(), 0.0));
}

SparseOperator assemble_dirichlet_laplacian(const Grid& grid) {
  const auto interior = grid.interior_nodes();
  std::vector<std::size_t> slot(grid.node_count(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < interior.size(); ++k) slot[interior[k]] = k;
  const double h2 = grid.spacing() * grid.spacing();
  const int N = grid.cells_per_side();
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const auto n = interior[k];
    const int i = grid.ix(n);
    const int j = grid.iy(n);
    t.push_back({k, k, 2.0 * grid.dim() / h2});
    auto couple = [&](int ii, int jj) {
      if (ii <= 0 || ii >= N) return;
      if (grid.dim() == 2 && (jj <= 0 || jj >= N)) return;
      t.push_back({k, slot[grid.index(ii, jj)], -1.0 / h2});
    };
    couple(i - 1, j);
    couple(i + 1, j);
    if (grid.dim() == 2) {
      couple(i, j - 1);
      couple(i, j + 1);
    }
  }
  return SparseOperator(interior.size(), std::move(t), true);
}

std::vector<double> robin_load(const Grid& grid, double beta, std::span<const double> boundary_values) {
  if (!(beta > 0.0)) throw std::invalid_argument("robin_load: beta must be positive");
  if (boundary_values.size() != grid.node_count()) throw std::invalid_argument("robin_load: size mismatch");
  const auto s = stencil_1d(grid.cells_per_side(), beta);
  const int N = grid.cells_per_side();
  std::vector<double> load(grid.node_count(), 0.0);
  for (const auto n : grid.boundary_nodes()) {
    const int i = grid.ix(n);
    const int j = grid.iy(n);
    double weight = 0.0;
    if (grid.dim() == 1) {
      weight = 1.0;
    } else {
      if (i == 0 || i == N) weight += s.mass[j];
      if (j == 0 || j == N) weight += s.mass[i];
    }
    load[n] = weight * boundary_values[n] / beta;
  }
  return load;
}

}  // namespace fluoinv
