#pragma once

#include <optional>
#include <span>

#include "fluoinv/grid.hpp"

namespace fluoinv {

/// sqrt(u^T M u), lumped mass.
double l2_norm(const GridFunction& u);
/// sqrt(u^T (M + A) u), A the natural-boundary stiffness.
double h1_norm(const GridFunction& u);
/// Norm in the dual of H^1: solve (M + A) w = M v, return sqrt(v^T M w).
double dual_h1_norm(const GridFunction& v);
/// The Riesz representative w of v used by dual_h1_norm.
GridFunction h1_riesz(const GridFunction& v);

/// Root mean square of sampled values.
double empirical_norm(std::span<const double> values);

struct ErrorBundle {
  std::optional<double> err1;  ///< |Sf - Sf*|_n / |Sf*|_n
  std::optional<double> err2;  ///< f in (H^1)*
  std::optional<double> err3;  ///< f in L^2
  std::optional<double> err4;  ///< q in (H^1)*
  std::optional<double> err5;  ///< q in L^2
};

/// Inputs for error_bundle. Leave a pair empty to skip the errors it feeds.
struct ErrorInputs {
  const GridFunction* f_rec = nullptr;
  const GridFunction* f_true = nullptr;
  /// Sf sampled at the sensors (reconstruction and truth).
  std::span<const double> Sf_rec_at_points;
  std::span<const double> Sf_true_at_points;
  const GridFunction* q_rec = nullptr;
  const GridFunction* q_true = nullptr;
};

/// Throws std::domain_error on a zero denominator.
ErrorBundle error_bundle(const ErrorInputs& in);

}  // namespace fluoinv
