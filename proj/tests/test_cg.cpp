#include <gtest/gtest.h>

#include <cstdlib>

#include "fluoinv/cg.hpp"
#include "fluoinv/sparse.hpp"
#include "support.hpp"

using namespace fluoinv;
namespace ts = testing_support;

namespace {

SparseOperator shifted_laplacian(const GridPtr& g) {
  const auto K = assemble_laplacian(*g, 0.5);
  const auto w = mass_weights(*g);
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < K.rows(); ++r) {
    for (auto k = K.row_ptr()[r]; k < K.row_ptr()[r + 1]; ++k) t.push_back({r, K.col_idx()[k], K.values()[k]});
    t.push_back({r, r, 3.0 * w[r]});
  }
  return SparseOperator(K.rows(), std::move(t), true);
}

}  // namespace

TEST(ConjugateGradient, MatchesGaussianElimination) {
  const auto g = make_grid(2, 10);
  const auto A = shifted_laplacian(g);
  const auto rhs = ts::random_vector(A.rows(), 11);
  const auto dense = ts::dense_of(A.rows(), [&](auto x, auto y) { A.apply(x, y); });
  const auto oracle = ts::gauss_solve(dense, rhs);
  const auto [x, rep] = cg_solve(A, GridFunction(g, rhs), 1e-13);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(ts::max_abs_diff(x.values(), oracle), 1e-10 * ts::max_abs(oracle));
}

TEST(ConjugateGradient, ResidualHistoryNonIncreasingAndWarmStart) {
  const auto g = make_grid(2, 16);
  const auto A = shifted_laplacian(g);
  const auto rhs = ts::random_vector(A.rows(), 12);
  const auto [x, rep] = cg_solve(A, GridFunction(g, rhs), 1e-12);
  ASSERT_TRUE(rep.converged);
  for (std::size_t k = 1; k < rep.residual_history.size(); ++k)
    EXPECT_LE(rep.residual_history[k], rep.residual_history[k - 1]);
  EXPECT_LE(rep.residual, 1e-12);

  auto warm = std::vector<double>(x.values().begin(), x.values().end());
  const LinearMap op = [&](auto in, auto out) { A.apply(in, out); };
  const LinearMap id = [](auto in, auto out) { std::copy(in.begin(), in.end(), out.begin()); };
  const auto rep2 = conjugate_gradient(op, id, rhs, warm, 1e-10, 100);
  EXPECT_TRUE(rep2.converged);
  EXPECT_EQ(rep2.iterations, 0);
}

TEST(ConjugateGradient, ReportsNonConvergence) {
  const auto g = make_grid(2, 16);
  const auto A = shifted_laplacian(g);
  const auto rhs = ts::random_vector(A.rows(), 13);
  const auto [x, rep] = cg_solve(A, GridFunction(g, rhs), 1e-14, 3);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 3);
}

TEST(ConjugateGradient, ZeroRightHandSide) {
  const auto g = make_grid(1, 8);
  const auto A = shifted_laplacian(g);
  const auto [x, rep] = cg_solve(A, GridFunction(g, 0.0), 1e-10);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(ts::max_abs(x.values()), 0.0);
}

TEST(ConjugateGradient, SolverTolEnvironmentOverride) {
  ::setenv("SOLVER_TOL", "1e-6", 1);
  EXPECT_DOUBLE_EQ(default_solver_tol(), 1e-6);
  ::setenv("SOLVER_TOL", "garbage", 1);
  EXPECT_DOUBLE_EQ(default_solver_tol(), 1e-10);
  ::unsetenv("SOLVER_TOL");
  EXPECT_DOUBLE_EQ(default_solver_tol(), 1e-10);
}
