#pragma once

#include <omp.h>

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace testing_support {

using Dense = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting; independent of every solver
/// in the library.
inline std::vector<double> gauss_solve(Dense A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (A[piv][c] == 0.0) throw std::runtime_error("singular matrix");
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return x;
}

inline std::vector<double> matvec(const Dense& A, std::span<const double> x) {
  std::vector<double> y(A.size(), 0.0);
  for (std::size_t r = 0; r < A.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += A[r][c] * x[c];
  return y;
}

/// Columns of a linear map applied to unit vectors.
inline Dense dense_of(std::size_t n, const std::function<void(std::span<const double>, std::span<double>)>& op) {
  Dense A(n, std::vector<double>(n, 0.0));
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    op(e, col);
    for (std::size_t r = 0; r < n; ++r) A[r][c] = col[r];
    e[c] = 0.0;
  }
  return A;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<long double>(a[k]) * b[k];
  return static_cast<double>(s);
}

/// Sets the OpenMP team size for one scope.
class ThreadCount {
public:
  explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved_); }
  ThreadCount(const ThreadCount&) = delete;
  ThreadCount& operator=(const ThreadCount&) = delete;

private:
  int saved_;
};

}  // namespace testing_support
