#pragma once

#include <cstddef>
#include <span>

namespace fluoinv::kernels {

// Read-only view of a compressed-row matrix.
struct CsrView {
  std::size_t rows = 0;
  std::span<const std::size_t> row_ptr;
  std::span<const std::size_t> col_idx;
  std::span<const double> values;
};

// Reductions are accumulated in fixed blocks of this many entries. The block
// partition never depends on the thread count, so the parallel kernels return
// the same bits for any OMP_NUM_THREADS.
inline constexpr std::size_t kReductionBlock = 4096;

/// Reference implementations. Plain loops, no OpenMP; kept for testing and
/// for the benchmark baseline.
namespace serial {
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
void spmv(const CsrView& A, std::span<const double> x, std::span<double> y);
}  // namespace serial

/// OpenMP kernels. Element-wise loops are split statically; reductions use
/// block partials summed in block order.
namespace parallel {
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void xpby(std::span<const double> x, double beta, std::span<double> y);
void hadamard(std::span<const double> a, std::span<const double> b, std::span<double> out);
void spmv(const CsrView& A, std::span<const double> x, std::span<double> y);
}  // namespace parallel

// The library calls the parallel kernels.
using parallel::axpy;
using parallel::dot;
using parallel::hadamard;
using parallel::spmv;
using parallel::weighted_dot;
using parallel::xpby;

double norm2(std::span<const double> a);

/// Pairwise (cascade) summation; order-independent of any thread schedule.
double pairwise_sum(std::span<const double> values);

}  // namespace fluoinv::kernels
