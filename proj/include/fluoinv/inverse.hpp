#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fluoinv/forward.hpp"

namespace fluoinv {

struct InverseConfig {
  double tol = 1e-10;  ///< stop when |q_{j+1} - q_j|_L2 < tol
  int max_iter = 200;
  bool clamp = false;  ///< project each iterate onto [0, M]
  int snapshot_every = 0;  ///< keep every k-th iterate in the trace; 0 keeps none
};

struct IterationTrace {
  std::vector<GridFunction> snapshots;
  std::vector<int> snapshot_index;
  std::vector<double> increments;  ///< |q_{j+1} - q_j|_L2, one per iteration
  std::vector<double> misfits;     ///< |u_m(T; q_j) - data|_L2 for the iterate fed into K
  /// Smallest nodal q_{j+1} - q_j per iteration (monotonicity diagnostic).
  std::vector<double> min_steps;
  bool converged = false;
  bool clamped = false;  ///< the projection changed some iterate
  int iterations = 0;
};

/// u_m(., T; q), the forward map G.
GridFunction forward_map(const ProblemData& data, const GridFunction& q);

/// (d_t u_m(T; q) - Lap g + p g) / u_e(T; q). Throws std::domain_error where
/// u_e(T; q) <= 0.
GridFunction operator_K(const ProblemData& data, const GridFunction& q, const GridFunction& g);

/// q_0 = (-Lap g + p g) / u_e(T; 0).
GridFunction initial_guess(const ProblemData& data, const GridFunction& g);

std::pair<GridFunction, IterationTrace> fixed_point_solve(const ProblemData& data, const GridFunction& g,
                                                          const InverseConfig& cfg = {});

/// K with (-Lap g, g) replaced by the reconstructions (f, Sf).
GridFunction operator_K_sigma(const ProblemData& data, const GridFunction& q, const GridFunction& f_rec,
                              const GridFunction& Sf_rec);

/// Noisy iteration; the default config clamps.
std::pair<GridFunction, IterationTrace> noisy_fixed_point_solve(const ProblemData& data, const GridFunction& f_rec,
                                                                const GridFunction& Sf_rec,
                                                                InverseConfig cfg = {1e-10, 200, true, 0});

struct DomainReport {
  bool inside = true;
  std::vector<std::size_t> above_upper;  ///< q > M
  std::vector<std::size_t> below_lower;  ///< q < (-Lap g + p g) / u_e(T; 0)
  std::string summary() const;
};

/// Membership in D = {q : M >= q >= q_0(g)}, nodewise with 1e-10 slack.
DomainReport check_domain(const ProblemData& data, const GridFunction& q, const GridFunction& g);

/// Discrete surrogates of the constants in the energy and stability estimates.
struct StabilityConstants {
  double C_p = 0.0;  ///< min p
  double M_b = 0.0;
  double m_Q = 0.0;  ///< min u_e(., T; M)
  double p_max = 0.0;
  double T = 0.0;
  double M = 0.0;
  /// sqrt(T) M_b / sqrt(C_p)
  double energy_constant() const;
  /// sqrt(T) M_b (M + 1) / (m_Q sqrt(C_p)); the stability estimate needs < 1.
  double contraction() const;
  /// sqrt(C_p) / (m_Q sqrt(C_p) - sqrt(T) M_b (M + 1)); infinite when the
  /// smallness condition fails.
  double stability_constant() const;
};

StabilityConstants stability_constants(const ProblemData& data);

}  // namespace fluoinv
