#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fluoinv/cg.hpp"
#include "fluoinv/grid.hpp"
#include "fluoinv/sparse.hpp"
#include "fluoinv/tensor_solver.hpp"

namespace fluoinv {

/// Robin boundary data b(x, t), evaluated at boundary nodes.
using BoundaryData = std::function<double(Point, double)>;

/**
 * Coefficients and discretisation of the coupled excitation/emission system.
 * Build through make_problem(), which validates the data, samples b on the
 * boundary-time grid and records warnings for data that break the sign conditions.
 */
struct ProblemData {
  GridPtr grid;
  GridFunction p;      ///< background absorption, positive
  BoundaryData b;
  double beta = 1.0;   ///< Robin parameter
  double T = 1.0;      ///< final time
  double tau = 0.01;   ///< time step
  int steps = 0;       ///< T / tau
  double M = 1.0;      ///< upper bound of the admissible set
  double M_b = 0.0;    ///< max of b, d_t b, d_tt b over boundary nodes and t in (0, T]
  double b_min_at_T = 0.0;
  std::vector<std::string> warnings;

  // Shared discretisation, immutable.
  std::shared_ptr<const SparseOperator> stiffness;  ///< Robin K = M L
  std::shared_ptr<const std::vector<double>> mass;  ///< lumped weights
  /// Robin load for time levels 1..steps; entry k-1 is level k.
  std::shared_ptr<const std::vector<std::vector<double>>> loads;

  double time(int level) const noexcept { return level * tau; }
};

/// Throws std::invalid_argument when p <= 0 somewhere, beta <= 0, tau <= 0,
/// M <= 0 or T / tau is not an integer. Violations of the sign conditions on
/// b only produce warnings.
ProblemData make_problem(GridPtr grid, GridFunction p, BoundaryData b, double beta, double T, double tau,
                         double M);

/// All time levels t_0 = 0 < ... < t_N = T of one field.
struct SpaceTimeField {
  GridPtr grid;
  double tau = 0.0;
  std::vector<GridFunction> levels;

  int last_level() const noexcept { return static_cast<int>(levels.size()) - 1; }
  const GridFunction& at(int level) const { return levels.at(static_cast<std::size_t>(level)); }
  /// Backward difference (u^k - u^{k-1}) / tau, k >= 1.
  GridFunction time_derivative(int level) const;
  /// (u^k - 2 u^{k-1} + u^{k-2}) / tau^2, k >= 2.
  GridFunction second_time_derivative(int level) const;
};

/// Backward Euler for (d_t - Lap) u_e + (p + q) u_e = 0, Robin data b, u_e(0) = 0.
/// Throws std::invalid_argument for negative q, std::runtime_error if the
/// step matrix cannot be factorised.
SpaceTimeField solve_excitation(const ProblemData& data, const GridFunction& q);

/// Backward Euler for (d_t - Lap) u_m + p u_m = q u_e, homogeneous Robin data.
SpaceTimeField solve_emission(const ProblemData& data, const GridFunction& q, const SpaceTimeField& u_e);

struct ForwardSolution {
  SpaceTimeField excitation;
  SpaceTimeField emission;
};
ForwardSolution solve_forward(const ProblemData& data, const GridFunction& q);

/// Last time slice, g = u(., T).
GridFunction terminal_data(const SpaceTimeField& u);

/// (u^N - u^{N-1}) / tau. For backward Euler this is exactly the discrete
/// residual Lap u^N - p u^N + q u_e^N. Throws with fewer than two levels.
GridFunction terminal_time_derivative(const SpaceTimeField& u);

/// -Lap g with the homogeneous Robin condition eliminated: M^{-1} K g.
GridFunction robin_neg_laplacian(const SparseOperator& stiffness, std::span<const double> mass,
                                 const GridFunction& g);
GridFunction robin_neg_laplacian(double beta, const GridFunction& g);

enum class EllipticBackend { ConjugateGradient, FastDiagonalization };

/**
 * The smoothing operator S: Sf solves -Lap(Sf) = f with homogeneous Robin
 * data. S = K^{-1} M, self-adjoint in the lumped-mass inner product.
 *
 * The fast-diagonalization backend is exact up to rounding and is what the
 * fitting code uses; the CG backend is the assembled-operator route and
 * throws std::runtime_error when CG fails to converge.
 */
class EllipticSolver {
public:
  EllipticSolver(GridPtr grid, double beta, EllipticBackend backend = EllipticBackend::FastDiagonalization,
                 double cg_tol = 0.0);

  /// out = S in (nodal vectors).
  void apply(std::span<const double> in, std::span<double> out) const;
  GridFunction apply(const GridFunction& f) const;
  /// Euclidean transpose S^T = M K^{-1}.
  void apply_transpose(std::span<const double> in, std::span<double> out) const;

  const GridPtr& grid() const noexcept { return grid_; }
  double beta() const noexcept { return beta_; }
  std::span<const double> mass() const noexcept { return mass_; }
  const SparseOperator& stiffness() const noexcept { return stiffness_; }
private:
  void solve_stiffness(std::span<const double> rhs, std::span<double> out) const;

  GridPtr grid_;
  double beta_;
  EllipticBackend backend_;
  double cg_tol_;
  std::vector<double> mass_;
  SparseOperator stiffness_;
  std::unique_ptr<TensorSolver> fast_;
};

/// Sf through the assembled Robin Laplacian and Jacobi CG. Throws
/// std::runtime_error if CG does not converge.
GridFunction elliptic_solve(const GridPtr& grid, double beta, const GridFunction& f,
                            EllipticBackend backend = EllipticBackend::ConjugateGradient);

/// Nodes where the post-hoc condition p >= Lap g / g fails (g > 0 assumed).
std::vector<std::size_t> potential_condition_violations(const ProblemData& data, const GridFunction& g);

}  // namespace fluoinv
