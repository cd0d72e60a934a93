#include <gtest/gtest.h>

#include "fluoinv/sparse.hpp"
#include "fluoinv/tensor_solver.hpp"
#include "support.hpp"

using namespace fluoinv;
namespace ts = testing_support;

namespace {

ts::Dense shifted_dense(const Grid& g, double beta, double shift) {
  const auto K = beta > 0.0 ? assemble_laplacian(g, beta) : assemble_neumann_stiffness(g);
  const auto w = mass_weights(g);
  auto A = ts::dense_of(K.rows(), [&](auto x, auto y) { K.apply(x, y); });
  for (std::size_t r = 0; r < A.size(); ++r) A[r][r] += shift * w[r];
  return A;
}

double inverse(double lambda, const void*) { return 1.0 / lambda; }
double one(double, const void*) { return 1.0; }

}  // namespace

TEST(TensorSolver, SolveMatchesDenseElimination) {
  struct Case {
    int dim;
    double beta, shift;
  };
  for (const auto c : {Case{2, 1.0, 0.0}, Case{2, 0.2, 2.5}, Case{2, 0.0, 1.0}, Case{1, 3.0, 0.0}}) {
    const auto g = make_grid(c.dim, 8);
    const TensorSolver solver(*g, stencil_1d(8, c.beta), c.shift);
    const auto rhs = ts::random_vector(g->node_count(), 21);
    std::vector<double> x(rhs.size());
    solver.solve(rhs, x);
    const auto oracle = ts::gauss_solve(shifted_dense(*g, c.beta, c.shift), rhs);
    EXPECT_LT(ts::max_abs_diff(x, oracle), 1e-11 * ts::max_abs(oracle)) << c.dim << " " << c.beta << " " << c.shift;
  }
}

TEST(TensorSolver, ApplyFunctionOfPencil) {
  const auto g = make_grid(2, 8);
  const TensorSolver solver(*g, stencil_1d(8, 0.5), 0.0);
  const auto rhs = ts::random_vector(g->node_count(), 22);
  std::vector<double> out(rhs.size());
  // phi = 1/lambda gives K^{-1} rhs.
  solver.apply_function(rhs, out, inverse, nullptr);
  const auto oracle = ts::gauss_solve(shifted_dense(*g, 0.5, 0.0), rhs);
  EXPECT_LT(ts::max_abs_diff(out, oracle), 1e-11 * ts::max_abs(oracle));
  // phi = 1 gives M^{-1} rhs.
  solver.apply_function(rhs, out, one, nullptr);
  const auto w = mass_weights(*g);
  for (std::size_t n = 0; n < rhs.size(); ++n) EXPECT_NEAR(out[n], rhs[n] / w[n], 1e-10 * std::abs(rhs[n] / w[n]) + 1e-12);
}

TEST(TensorSolver, EigenvaluesAscendingNonNegative) {
  const TensorSolver neumann(*make_grid(2, 8), stencil_1d(8, 0.0), 1.0);
  const auto& lam = neumann.eigenvalues_1d();
  EXPECT_NEAR(lam(0), 0.0, 1e-10);
  for (Eigen::Index k = 1; k < lam.size(); ++k) EXPECT_GT(lam(k), lam(k - 1));
}
