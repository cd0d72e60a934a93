#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fluoinv/grid.hpp"
#include "fluoinv/sparse.hpp"

namespace fluoinv {

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  ///< relative residual |b - A x| / |b| of the returned iterate
  bool converged = false;
  /// Best relative residual reached after each iteration (entry 0 is the
  /// starting guess); non-increasing.
  std::vector<double> residual_history;
};

/// y = Op(x). Both spans have the system size.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/**
 * Preconditioned conjugate gradients for a symmetric positive definite map.
 * `x` carries the initial guess in and the solution out. `precond` applies an
 * SPD approximation of A^{-1}; pass an empty map for no preconditioning.
 *
 * The returned iterate is the one with the smallest residual seen, so a run
 * that stops on max_iter still hands back its best approximation.
 */
SolveReport conjugate_gradient(const LinearMap& A, const LinearMap& precond, std::span<const double> rhs,
                               std::span<double> x, double tol, int max_iter);

/// Jacobi-preconditioned CG on an assembled operator, starting from zero.
/// max_iter <= 0 selects 10 * rows.
std::pair<GridFunction, SolveReport> cg_solve(const SparseOperator& A, const GridFunction& rhs, double tol,
                                              int max_iter = 0);

/// Default relative tolerance for the iterative solves (1e-10). The
/// SOLVER_TOL environment variable overrides it.
double default_solver_tol();

}  // namespace fluoinv
