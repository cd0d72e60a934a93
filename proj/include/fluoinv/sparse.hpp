#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fluoinv/grid.hpp"
#include "fluoinv/kernels.hpp"

namespace fluoinv {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Square sparse matrix in compressed-row layout.
class SparseOperator {
public:
  SparseOperator() = default;
  /// Duplicate (row, col) entries are summed. Throws on out-of-range indices.
  SparseOperator(std::size_t n, std::vector<Triplet> entries, bool symmetric);

  static SparseOperator diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return values_.size(); }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  kernels::CsrView view() const noexcept { return {n_, row_ptr_, col_idx_, values_}; }

  /// y = A x.
  void apply(std::span<const double> x, std::span<double> y) const;
  GridFunction apply(const GridFunction& x) const;

  double entry(std::size_t row, std::size_t col) const noexcept;
  std::vector<double> diagonal_values() const;

  /// max |A_ij - A_ji| / max |A_ij| over stored entries.
  double symmetry_defect() const;

private:
  std::size_t n_ = 0;
  bool symmetric_ = false;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Lumped nodal quadrature weights; they sum to 1 on the unit domain.
std::vector<double> mass_weights(const Grid& grid);

/// Diagonal lumped mass matrix.
SparseOperator assemble_mass(const Grid& grid);

/**
 * Symmetric form K = M L of the 3-point / 5-point negative Laplacian whose
 * Robin condition beta du/dn + u = b has been eliminated through second-order
 * ghost nodes. The finite-difference operator itself is L = M^{-1} K, whose
 * interior rows are the standard (-1, 2, -1)/h^2 stencils. The boundary data
 * enter through robin_load().
 *
 * Throws std::invalid_argument for beta <= 0.
 */
SparseOperator assemble_laplacian(const Grid& grid, double beta);

/// Stiffness of the natural-boundary (Neumann) Laplacian: u^T A u = |grad u|^2.
SparseOperator assemble_neumann_stiffness(const Grid& grid);

/// Dirichlet finite-difference Laplacian on interior nodes only, ordered as
/// Grid::interior_nodes().
SparseOperator assemble_dirichlet_laplacian(const Grid& grid);

/// Nodal load vector of the Robin data: K u - robin_load(b) = M (-Lap u).
std::vector<double> robin_load(const Grid& grid, double beta, std::span<const double> boundary_values);

/// 1D building blocks of the tensor-product operators above.
struct Stencil1D {
  std::vector<double> diag;   // N+1 entries
  std::vector<double> off;    // N entries, coupling i and i+1
  std::vector<double> mass;   // lumped 1D weights
};
/// beta > 0: Robin stiffness; beta <= 0 selects the natural (Neumann) stiffness.
Stencil1D stencil_1d(int cells, double beta);

}  // namespace fluoinv
