#include <gtest/gtest.h>

#include <cstring>
#include <numeric>

#include "fluoinv/grid.hpp"
#include "fluoinv/kernels.hpp"
#include "fluoinv/sparse.hpp"
#include "support.hpp"

using namespace fluoinv;
using testing_support::random_vector;
using testing_support::ThreadCount;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, ParallelMatchesSerialReference) {
  const std::size_t n = 3 * kernels::kReductionBlock + 17;
  const auto a = random_vector(n, 1), b = random_vector(n, 2), w = random_vector(n, 3, 0.0, 1.0);
  const double scale = static_cast<double>(n);
  EXPECT_NEAR(kernels::parallel::dot(a, b), kernels::serial::dot(a, b), 1e-14 * scale);
  EXPECT_NEAR(kernels::parallel::weighted_dot(w, a, b), kernels::serial::weighted_dot(w, a, b), 1e-14 * scale);

  auto y1 = b, y2 = b;
  kernels::serial::axpy(0.3, a, y1);
  kernels::parallel::axpy(0.3, a, y2);
  EXPECT_EQ(y1, y2);
  kernels::serial::xpby(a, -1.7, y1);
  kernels::parallel::xpby(a, -1.7, y2);
  EXPECT_EQ(y1, y2);
  std::vector<double> h1(n), h2(n);
  kernels::serial::hadamard(a, b, h1);
  kernels::parallel::hadamard(a, b, h2);
  EXPECT_EQ(h1, h2);
}

TEST(Kernels, SpmvMatchesSerialReference) {
  const auto grid = make_grid(2, 40);
  const auto K = assemble_laplacian(*grid, 0.5);
  const auto x = random_vector(grid->node_count(), 4);
  std::vector<double> y1(x.size()), y2(x.size());
  kernels::serial::spmv(K.view(), x, y1);
  kernels::parallel::spmv(K.view(), x, y2);
  EXPECT_EQ(y1, y2);
}

TEST(Kernels, ReductionsIndependentOfThreadCount) {
  const std::size_t n = 10 * kernels::kReductionBlock + 3;
  const auto a = random_vector(n, 5), b = random_vector(n, 6);
  double d1, d4, p1, p4;
  {
    ThreadCount t(1);
    d1 = kernels::parallel::dot(a, b);
    p1 = kernels::pairwise_sum(a);
  }
  {
    ThreadCount t(4);
    d4 = kernels::parallel::dot(a, b);
    p4 = kernels::pairwise_sum(a);
  }
  EXPECT_TRUE(same_bits(d1, d4));
  EXPECT_TRUE(same_bits(p1, p4));
}

TEST(Kernels, PairwiseSumAccuracy) {
  // 1 + many tiny values: naive left-to-right summation loses them.
  std::vector<double> v(1 << 20, 1e-16);
  v[0] = 1.0;
  const long double exact = 1.0L + static_cast<long double>(v.size() - 1) * 1e-16L;
  EXPECT_NEAR(kernels::pairwise_sum(v), static_cast<double>(exact), 1e-15);
  EXPECT_EQ(kernels::pairwise_sum(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(kernels::norm2(std::vector<double>{3.0, 4.0}), 5.0);
}
