#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fluoinv/fit.hpp"
#include "fluoinv/grid.hpp"

namespace fluoinv {

/// Largest grid (cells per side) accepted by the dense spectral routines.
inline constexpr int kMaxDenseCells = 64;
/// Largest point count accepted by empirical_smoothing_spectrum.
inline constexpr std::size_t kMaxSpectrumPoints = 400;

struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< ascending
  double exponent = 0.0;            ///< log-log slope of eigenvalue against index
  double r2 = 0.0;
  int fit_first = 0;  ///< 1-based index range of the fit
  int fit_last = 0;
};

/// Least-squares log-log slope over 1-based indices [first, last].
/// Throws unless the range holds at least 10 indices.
void fit_growth(SpectrumReport& report, int first, int last);

/// Smallest k_max eigenvalues of the Dirichlet finite-difference Laplacian,
/// dense symmetric solve. Exponent fitted over k in [10, k_max].
/// Throws std::invalid_argument for grids beyond kMaxDenseCells or k_max
/// larger than the interior node count.
SpectrumReport laplacian_spectrum(const Grid& grid, int k_max);

/// B = (1/n) (E S) R_s^{-1} (E S)^T, built column by column.
Eigen::MatrixXd smoothing_reduced_matrix(const SmoothingFit& fitter, int s);

/// rho_k = 1 / eta_k with eta_k the eigenvalues of B, ascending. Exponent
/// fitted over k >= 10. Throws std::runtime_error when B is rank deficient
/// (coincident points) and std::invalid_argument beyond kMaxSpectrumPoints.
SpectrumReport empirical_smoothing_spectrum(const GridPtr& grid, double beta, std::span<const Point> points, int s);

}  // namespace fluoinv
