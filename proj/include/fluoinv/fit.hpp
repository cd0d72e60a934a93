#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fluoinv/cg.hpp"
#include "fluoinv/forward.hpp"
#include "fluoinv/grid.hpp"
#include "fluoinv/tensor_solver.hpp"

namespace fluoinv {

struct MeasurementSet {
  std::vector<Point> points;
  std::vector<double> values;  ///< g_i^sigma
  double sigma = 0.0;          ///< nominal noise level
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return points.size(); }
};

/**
 * Multilinear interpolation at fixed points (linear in 1D, bilinear in 2D).
 * apply() is E, adjoint() is E^T.
 */
class PointEvaluation {
public:
  /// Throws std::invalid_argument for a point outside the closed domain.
  PointEvaluation(GridPtr grid, std::span<const Point> points);

  std::size_t size() const noexcept { return count_; }
  const GridPtr& grid() const noexcept { return grid_; }

  void apply(std::span<const double> nodal, std::span<double> out) const;
  std::vector<double> apply(const GridFunction& u) const;
  /// out = E^T y (overwrites out).
  void adjoint(std::span<const double> y, std::span<double> out) const;

private:
  static constexpr int kStencil = 4;
  GridPtr grid_;
  std::size_t count_ = 0;
  std::vector<std::size_t> nodes_;  // kStencil per point
  std::vector<double> weights_;
};

struct FitConfig {
  int s = 0;             ///< penalty order, 0 (L^2) or 1 (H^1)
  double lambda = 1e-6;  ///< regularization weight
  double tol = 1e-10;    ///< relative residual of the outer CG
  int max_iter = 0;      ///< 0 selects 10 * node count
};

struct FitResult {
  GridFunction f;
  GridFunction Sf;
  double lambda = 0.0;
  int s = 0;
  double misfit = 0.0;        ///< |E Sf - g|_n
  double penalty_norm = 0.0;  ///< |f|_{H^s}
  SolveReport report;
};

/**
 * Reusable P1 solver for a fixed grid, Robin parameter and sensor set:
 * minimises (1/n) |E S f - g|^2 + lambda |f|_{H^s}^2 through the normal
 * equations (lambda R + (1/n) S^T E^T E S) f = (1/n) S^T E^T g with PCG.
 *
 * Thread-safe: solve() keeps its workspace local.
 */
class SmoothingFit {
public:
  SmoothingFit(GridPtr grid, double beta, std::span<const Point> points);

  /// Throws std::invalid_argument for lambda <= 0, s outside {0, 1} or a
  /// size mismatch. `warm` seeds the outer CG.
  FitResult solve(std::span<const double> values, const FitConfig& cfg, const GridFunction* warm = nullptr) const;

  /// R_s f: mass (s = 0) or mass plus natural stiffness (s = 1).
  void gram(int s, std::span<const double> f, std::span<double> out) const;
  /// R_s^{-1} r.
  void gram_inverse(int s, std::span<const double> r, std::span<double> out) const;
  /// f^T R_s f.
  double penalty(int s, std::span<const double> f) const;

  /// The normal operator (lambda R_s + (1/n) S^T E^T E S) f.
  void normal_operator(int s, double lambda, std::span<const double> f, std::span<double> out) const;
  /// (1/n) |E S f - g|^2 + lambda f^T R_s f.
  double objective(std::span<const double> values, int s, double lambda, std::span<const double> f) const;

  const EllipticSolver& smoother() const noexcept { return S_; }
  const PointEvaluation& sampler() const noexcept { return E_; }
  const GridPtr& grid() const noexcept { return grid_; }

private:
  GridPtr grid_;
  EllipticSolver S_;
  PointEvaluation E_;
  SparseOperator neumann_;
  TensorSolver riesz_;   // (M + A)^{-1}
  TensorSolver robin_;   // eigenbasis of M^{-1} K for the preconditioner
};

/// One-shot wrapper around SmoothingFit.
FitResult solve_p1(const GridPtr& grid, double beta, const MeasurementSet& meas, const FitConfig& cfg);

/// lambda = (sigma n^{-1/2} / |f*|_{H^s})^{1 / (1/2 + 1/(4 + 2s))}.
/// Throws std::invalid_argument unless norm_f_star > 0, sigma > 0 and n >= 1.
double optimal_lambda_prior(double norm_f_star, double sigma, std::size_t n, int s);

/// 1/2 + 1/(4 + 2s).
double lambda_exponent(int s);

struct LambdaSearch {
  double lambda = 0.0;       ///< lambda at the stop
  FitResult fit;             ///< fit recomputed at lambda
  FitResult last_loop_fit;   ///< the fit whose update produced lambda
  std::vector<double> trace; ///< lambda_0, lambda_1, ...
  bool converged = false;
  int outer_iterations = 0;
};

/// Self-consistent loop: lambda_0^a = n^{-1/2}, then
/// lambda_{j+1}^a = |S f - g|_n n^{-1/2} / |f|_{H^s}, until |lambda_j - lambda_{j+1}| < stop_tol.
/// Throws std::domain_error if a fit returns f = 0.
LambdaSearch self_consistent_lambda(const SmoothingFit& fitter, std::span<const double> values, int s,
                                    double stop_tol = 1e-10, int max_outer = 50, double cg_tol = 1e-10);
LambdaSearch self_consistent_lambda(const GridPtr& grid, double beta, const MeasurementSet& meas, int s,
                                    double stop_tol = 1e-10, int max_outer = 50);

}  // namespace fluoinv
