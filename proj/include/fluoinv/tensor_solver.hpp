#pragma once

#include <span>

#include <Eigen/Dense>

#include "fluoinv/grid.hpp"
#include "fluoinv/sparse.hpp"

namespace fluoinv {

/**
 * Direct solver for (K + c M) u = r where K is a tensor-product stiffness
 * built from one 1D stencil (K1 (x) M1 + M1 (x) K1 in 2D) and M the lumped
 * mass. Uses the M1-orthonormal generalized eigenvectors of (K1, M1), so a
 * solve costs four dense (N+1)^2 products in 2D.
 *
 * Thread-safe: solve() only touches local workspace.
 */
class TensorSolver {
public:
  TensorSolver(const Grid& grid, const Stencil1D& stencil, double shift);

  void solve(std::span<const double> rhs, std::span<double> out) const;

  /// out = V phi(Lambda) V^T rhs, i.e. phi(M^{-1} K) M^{-1} rhs, where the 2D
  /// eigenvalue of mode (i, j) is lambda_i + lambda_j. The shift is ignored.
  void apply_function(std::span<const double> rhs, std::span<double> out, double (*phi)(double, const void*),
                      const void* ctx) const;

  /// Generalized eigenvalues of the 1D pencil, ascending.
  const Eigen::VectorXd& eigenvalues_1d() const noexcept { return lambda_; }

private:
  int dim_;
  int side_;
  double shift_;
  Eigen::MatrixXd vectors_;  // columns M1-orthonormal
  Eigen::VectorXd lambda_;
};

}  // namespace fluoinv
