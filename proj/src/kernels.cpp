#include "fluoinv/kernels.hpp"

#include <cassert>
#include <cmath>
#include <vector>

namespace fluoinv::kernels {

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  assert(a.size() == b.size() && w.size() == a.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && out.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
}

void spmv(const CsrView& A, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < A.rows; ++r) {
    double s = 0.0;
    for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace serial

namespace parallel {

namespace {

template <typename BlockFn>
double blocked_reduce(std::size_t n, BlockFn&& block_sum) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  if (nblocks <= 1) return block_sum(std::size_t{0}, n);
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(static)
  for (long long b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

// Element-wise loops below this size are not worth a parallel region.
constexpr long long kParallelThreshold = 8192;

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return blocked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  assert(a.size() == b.size() && w.size() == a.size());
  return blocked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += w[i] * a[i] * b[i];
    return s;
  });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (long long i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  assert(x.size() == y.size());
  const auto n = static_cast<long long>(x.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (long long i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  assert(a.size() == b.size() && out.size() == a.size());
  const auto n = static_cast<long long>(a.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (long long i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void spmv(const CsrView& A, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<long long>(A.rows);
  const std::size_t* row_ptr = A.row_ptr.data();
  const std::size_t* cols = A.col_idx.data();
  const double* vals = A.values.data();
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for schedule(static) if (rows > kParallelThreshold / 4)
  for (long long r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * xp[cols[k]];
    yp[r] = s;
  }
}

}  // namespace parallel

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace fluoinv::kernels
