#include <gtest/gtest.h>

#include <cmath>

#include "fluoinv/experiments.hpp"
#include "fluoinv/fit.hpp"
#include "fluoinv/metrics.hpp"
#include "fluoinv/stochastic.hpp"
#include "support.hpp"

using namespace fluoinv;
namespace ts = testing_support;

namespace {

std::vector<Point> random_points(std::size_t n, std::uint64_t seed) {
  const auto u = ts::random_vector(2 * n, seed, 0.0, 1.0);
  std::vector<Point> pts(n);
  for (std::size_t k = 0; k < n; ++k) pts[k] = {u[2 * k], u[2 * k + 1]};
  return pts;
}

// Dense (1/n) S^T E^T E S + lambda M and its right-hand side, built from the
// assembled stiffness with Gaussian elimination standing in for S.
std::vector<double> dense_fit_s0(const Grid& g, double beta, const PointEvaluation& E, std::span<const double> y,
                                 double lambda) {
  const std::size_t N = g.node_count(), n = E.size();
  const auto K = assemble_laplacian(g, beta);
  const auto w = mass_weights(g);
  const auto Kd = ts::dense_of(N, [&](auto x, auto out) { K.apply(x, out); });
  // Columns of ES.
  ts::Dense ES(n, std::vector<double>(N));
  std::vector<double> e(N, 0.0), col(n);
  for (std::size_t c = 0; c < N; ++c) {
    e[c] = w[c];
    const auto s = ts::gauss_solve(Kd, e);
    E.apply(s, col);
    for (std::size_t r = 0; r < n; ++r) ES[r][c] = col[r];
    e[c] = 0.0;
  }
  ts::Dense A(N, std::vector<double>(N, 0.0));
  std::vector<double> rhs(N, 0.0);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = 0; b < N; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += ES[r][a] * ES[r][b];
      A[a][b] = s / static_cast<double>(n);
    }
    A[a][a] += lambda * w[a];
    for (std::size_t r = 0; r < n; ++r) rhs[a] += ES[r][a] * y[r] / static_cast<double>(n);
  }
  return ts::gauss_solve(A, rhs);
}

}  // namespace

TEST(PointEvaluation, ExactOnBilinearFunctions) {
  const auto g = make_grid(2, 7);
  auto pts = random_points(50, 41);
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 1.0});
  pts.push_back({1.0, 0.3});
  const PointEvaluation E(g, pts);
  auto f = [](Point p) { return 1.0 + 2.0 * p.x - 3.0 * p.y + 4.0 * p.x * p.y; };
  const auto vals = E.apply(GridFunction::from(g, f));
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_NEAR(vals[k], f(pts[k]), 1e-13);
}

TEST(PointEvaluation, OneDimensionalLinearInterpolation) {
  const auto g = make_grid(1, 10);
  const std::vector<Point> pts{{0.05, 0.0}, {0.5, 0.0}, {1.0, 0.0}};
  const PointEvaluation E(g, pts);
  const auto vals = E.apply(GridFunction::from(g, [](Point p) { return 3.0 * p.x - 1.0; }));
  for (std::size_t k = 0; k < pts.size(); ++k) EXPECT_NEAR(vals[k], 3.0 * pts[k].x - 1.0, 1e-14);
}

TEST(PointEvaluation, AdjointIdentity) {
  const auto g = make_grid(2, 9);
  const PointEvaluation E(g, random_points(40, 42));
  const auto u = ts::random_vector(g->node_count(), 43), y = ts::random_vector(40, 44);
  std::vector<double> Eu(40), ETy(g->node_count());
  E.apply(u, Eu);
  E.adjoint(y, ETy);
  EXPECT_NEAR(ts::dot(Eu, y), ts::dot(u, ETy), 1e-13);
}

TEST(PointEvaluation, RejectsPointsOutsideDomain) {
  const auto g = make_grid(2, 8);
  const std::vector<Point> bad{{0.5, 1.0 + 1e-9}};
  EXPECT_THROW(PointEvaluation(g, bad), std::invalid_argument);
  const std::vector<Point> neg{{-0.1, 0.5}};
  EXPECT_THROW(PointEvaluation(g, neg), std::invalid_argument);
}

TEST(SmoothingFit, NormalOperatorIsSymmetricPositive) {
  const auto g = make_grid(2, 6);
  const auto pts = random_points(20, 45);
  const SmoothingFit fit(g, 1.0, pts);
  for (int s : {0, 1}) {
    const auto A = ts::dense_of(g->node_count(), [&](auto x, auto y) { fit.normal_operator(s, 1e-3, x, y); });
    double defect = 0.0, scale = 0.0;
    for (std::size_t r = 0; r < A.size(); ++r)
      for (std::size_t c = 0; c < A.size(); ++c) {
        defect = std::max(defect, std::abs(A[r][c] - A[c][r]));
        scale = std::max(scale, std::abs(A[r][c]));
      }
    EXPECT_LT(defect, 1e-12 * scale) << "s=" << s;
    const auto v = ts::random_vector(g->node_count(), 46);
    EXPECT_GT(ts::dot(v, ts::matvec(A, v)), 0.0);
  }
}

TEST(SmoothingFit, GramInverseInvertsGram) {
  const auto g = make_grid(2, 8);
  const SmoothingFit fit(g, 1.0, random_points(10, 47));
  const auto r = ts::random_vector(g->node_count(), 48);
  std::vector<double> x(r.size()), back(r.size());
  for (int s : {0, 1}) {
    fit.gram_inverse(s, r, x);
    fit.gram(s, x, back);
    EXPECT_LT(ts::max_abs_diff(back, r), 1e-11 * ts::max_abs(r));
    EXPECT_NEAR(fit.penalty(s, x), ts::dot(x, back), 1e-12 * std::abs(ts::dot(x, back)));
  }
}

TEST(SmoothingFit, MatchesDenseNormalEquationsForL2Penalty) {
  const auto g = make_grid(2, 6);
  const auto pts = random_points(30, 49);
  const SmoothingFit fit(g, 0.8, pts);
  const auto y = ts::random_vector(pts.size(), 50);
  for (double lambda : {1e-2, 1e-5}) {
    const auto res = fit.solve(y, {0, lambda, 1e-13, 0});
    ASSERT_TRUE(res.report.converged);
    const auto oracle = dense_fit_s0(*g, 0.8, fit.sampler(), y, lambda);
    EXPECT_LT(ts::max_abs_diff(res.f.values(), oracle), 1e-8 * ts::max_abs(oracle)) << lambda;
    // Sf is the smoothed reconstruction.
    EXPECT_LT(ts::max_abs_diff(res.Sf.values(), fit.smoother().apply(res.f).values()), 1e-12);
  }
}

TEST(SmoothingFit, H1SolutionMinimisesObjective) {
  const auto g = make_grid(2, 10);
  const auto pts = random_points(60, 51);
  const SmoothingFit fit(g, 1.0, pts);
  const auto y = ts::random_vector(pts.size(), 52);
  const double lambda = 1e-4;
  const auto res = fit.solve(y, {1, lambda, 1e-13, 0});
  ASSERT_TRUE(res.report.converged);
  const double J0 = fit.objective(y, 1, lambda, res.f.values());
  // Central directional derivatives vanish and the quadratic grows both ways.
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto v = ts::random_vector(g->node_count(), 60 + k);
    const double eps = 1e-3;
    std::vector<double> plus(v.size()), minus(v.size());
    for (std::size_t n = 0; n < v.size(); ++n) {
      plus[n] = res.f[n] + eps * v[n];
      minus[n] = res.f[n] - eps * v[n];
    }
    const double Jp = fit.objective(y, 1, lambda, plus), Jm = fit.objective(y, 1, lambda, minus);
    EXPECT_GT(Jp, J0);
    EXPECT_GT(Jm, J0);
    const double curvature = (Jp + Jm - 2.0 * J0) / (eps * eps);
    EXPECT_LT(std::abs(Jp - Jm) / (2.0 * eps), 1e-5 * curvature * eps + 1e-9);
  }
}

TEST(SmoothingFit, MisfitGrowsAndPenaltyShrinksWithLambda) {
  const auto g = make_grid(2, 12);
  const auto pts = random_points(80, 53);
  const SmoothingFit fit(g, 1.0, pts);
  const auto y = ts::random_vector(pts.size(), 54);
  for (int s : {0, 1}) {
    double prev_misfit = 0.0, prev_norm = INFINITY;
    for (double lambda : {1e-7, 1e-5, 1e-3, 1e-1}) {
      const auto res = fit.solve(y, {s, lambda, 1e-12, 0});
      EXPECT_GE(res.misfit, prev_misfit - 1e-12);
      EXPECT_LE(res.penalty_norm, prev_norm + 1e-12);
      prev_misfit = res.misfit;
      prev_norm = res.penalty_norm;
    }
  }
}

TEST(SmoothingFit, RejectsBadArguments) {
  const auto g = make_grid(2, 6);
  const auto pts = random_points(10, 55);
  const SmoothingFit fit(g, 1.0, pts);
  const std::vector<double> y(10, 1.0), short_y(9, 1.0);
  EXPECT_THROW(fit.solve(y, {0, 0.0, 1e-10, 0}), std::invalid_argument);
  EXPECT_THROW(fit.solve(y, {2, 1e-3, 1e-10, 0}), std::invalid_argument);
  EXPECT_THROW(fit.solve(short_y, {0, 1e-3, 1e-10, 0}), std::invalid_argument);
}

TEST(SmoothingFit, NoiseFreeDataIsReproduced) {
  const auto truth = make_example1(2, 32, 1.0);
  const auto pts = sample_points(2, 2000, 7);
  const auto meas = observe(truth.Sf_true, pts, {NoiseKind::Zero, 0.0, 0});
  const auto res = solve_p1(truth.grid, 1.0, meas, {0, 1e-10, 1e-12, 0});
  const PointEvaluation E(truth.grid, pts);
  const auto a = E.apply(res.Sf), b = E.apply(truth.Sf_true);
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  EXPECT_LT(empirical_norm(d) / empirical_norm(b), 1e-3);
}

TEST(Lambda, PriorFormula) {
  EXPECT_DOUBLE_EQ(lambda_exponent(0), 0.75);
  EXPECT_NEAR(lambda_exponent(1), 0.5 + 1.0 / 6.0, 1e-15);
  const double expected = std::pow(0.01 / 100.0 / 0.5, 1.0 / 0.75);
  EXPECT_NEAR(optimal_lambda_prior(0.5, 0.01, 10000, 0), expected, 1e-15 * expected);
  EXPECT_THROW(optimal_lambda_prior(0.0, 0.01, 10, 0), std::invalid_argument);
  EXPECT_THROW(optimal_lambda_prior(1.0, 0.0, 10, 0), std::invalid_argument);
  EXPECT_THROW(optimal_lambda_prior(1.0, 0.1, 0, 0), std::invalid_argument);
}

TEST(Lambda, SelfConsistentLoopReachesFixedPoint) {
  const auto truth = make_example1(2, 24, 1.0);
  const auto pts = sample_points(2, 1000, 3);
  const auto meas = observe(truth.Sf_true, pts, {NoiseKind::Gaussian, 0.01, 9});
  const SmoothingFit fitter(truth.grid, 1.0, pts);
  for (int s : {0, 1}) {
    const auto search = self_consistent_lambda(fitter, meas.values, s, 1e-12, 100);
    ASSERT_TRUE(search.converged) << s;
    ASSERT_GE(search.trace.size(), 2u);
    EXPECT_NEAR(search.trace.front(), std::pow(1000.0, -0.5 / lambda_exponent(s)), 1e-12);
    // lambda^a = misfit n^{-1/2} / |f| at the last loop fit.
    const auto& f = search.last_loop_fit;
    const double implied = std::pow(f.misfit / std::sqrt(1000.0) / f.penalty_norm, 1.0 / lambda_exponent(s));
    EXPECT_NEAR(implied, search.lambda, 1e-9 * search.lambda);
    EXPECT_DOUBLE_EQ(search.fit.lambda, search.lambda);
  }
}
