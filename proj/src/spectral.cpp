#include "fluoinv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "fluoinv/sparse.hpp"
#include "fluoinv/stochastic.hpp"

namespace fluoinv {

void fit_growth(SpectrumReport& report, int first, int last) {
  if (first < 1 || last > static_cast<int>(report.eigenvalues.size()) || last - first + 1 < 10)
    throw std::invalid_argument("fit_growth: the fit needs at least 10 indices");
  std::vector<double> k, v;
  for (int i = first; i <= last; ++i) {
    k.push_back(static_cast<double>(i));
    v.push_back(report.eigenvalues[static_cast<std::size_t>(i - 1)]);
  }
  const auto r = fit_rate(k, v);
  report.exponent = r.slope;
  report.r2 = r.r2;
  report.fit_first = first;
  report.fit_last = last;
}

SpectrumReport laplacian_spectrum(const Grid& grid, int k_max) {
  if (grid.cells_per_side() > kMaxDenseCells)
    throw std::invalid_argument("laplacian_spectrum: grid exceeds the dense cap of " +
                                std::to_string(kMaxDenseCells) + " cells per side");
  const auto L = assemble_dirichlet_laplacian(grid);
  const auto n = static_cast<Eigen::Index>(L.rows());
  if (k_max < 1 || k_max > n) throw std::invalid_argument("laplacian_spectrum: k_max out of range");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const auto rp = L.row_ptr();
  const auto ci = L.col_idx();
  const auto val = L.values();
  for (Eigen::Index r = 0; r < n; ++r)
    for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) A(r, static_cast<Eigen::Index>(ci[k])) = val[k];
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("laplacian_spectrum: eigensolver failed");
  SpectrumReport rep;
  rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k_max);
  if (k_max >= 19) fit_growth(rep, 10, k_max);
  return rep;
}

Eigen::MatrixXd smoothing_reduced_matrix(const SmoothingFit& fitter, int s) {
  const auto& E = fitter.sampler();
  const auto& S = fitter.smoother();
  const auto n = static_cast<Eigen::Index>(E.size());
  const std::size_t N = fitter.grid()->node_count();
  Eigen::MatrixXd B(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < n; ++c) {
    std::vector<double> unit(static_cast<std::size_t>(n), 0.0), a(N), b(N), col(static_cast<std::size_t>(n));
    unit[static_cast<std::size_t>(c)] = 1.0;
    E.adjoint(unit, a);
    S.apply_transpose(a, b);
    fitter.gram_inverse(s, b, a);
    S.apply(a, b);
    E.apply(b, col);
    for (Eigen::Index r = 0; r < n; ++r) B(r, c) = col[static_cast<std::size_t>(r)] / static_cast<double>(n);
  }
  return 0.5 * (B + B.transpose());
}

SpectrumReport empirical_smoothing_spectrum(const GridPtr& grid, double beta, std::span<const Point> points, int s) {
  if (points.size() > kMaxSpectrumPoints)
    throw std::invalid_argument("empirical_smoothing_spectrum: more than " + std::to_string(kMaxSpectrumPoints) +
                                " points");
  const SmoothingFit fitter(grid, beta, points);
  const Eigen::MatrixXd B = smoothing_reduced_matrix(fitter, s);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("empirical_smoothing_spectrum: eigensolver failed");
  const auto& eta = es.eigenvalues();
  const double top = eta.maxCoeff();
  SpectrumReport rep;
  for (Eigen::Index k = 0; k < eta.size(); ++k) {
    if (!(eta(k) > 1e-14 * top))
      throw std::runtime_error("empirical_smoothing_spectrum: reduced matrix is rank deficient (coincident points?)");
    rep.eigenvalues.push_back(1.0 / eta(k));
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  const int m = static_cast<int>(rep.eigenvalues.size());
  if (m >= 19) fit_growth(rep, 10, m);
  return rep;
}

}  // namespace fluoinv
