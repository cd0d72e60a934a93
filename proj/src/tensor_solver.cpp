#include "fluoinv/tensor_solver.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fluoinv {

TensorSolver::TensorSolver(const Grid& grid, const Stencil1D& stencil, double shift)
    : dim_(grid.dim()), side_(grid.nodes_per_side()), shift_(shift) {
  const int n = side_;
  if (static_cast<int>(stencil.diag.size()) != n) throw std::invalid_argument("TensorSolver: stencil size mismatch");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = stencil.diag[i];
    M(i, i) = stencil.mass[i];
    if (i + 1 < n) K(i, i + 1) = K(i + 1, i) = stencil.off[i];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw std::runtime_error("TensorSolver: eigendecomposition failed");
  vectors_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
  const double smallest = dim_ == 1 ? lambda_(0) + shift_ : 2.0 * lambda_(0) + shift_;
  if (!(smallest > 0.0)) throw std::invalid_argument("TensorSolver: operator is not positive definite");
}

void TensorSolver::solve(std::span<const double> rhs, std::span<double> out) const {
  const Eigen::Index n = side_;
  if (dim_ == 1) {
    Eigen::Map<const Eigen::VectorXd> r(rhs.data(), n);
    Eigen::VectorXd g = vectors_.transpose() * r;
    for (Eigen::Index i = 0; i < n; ++i) g(i) /= lambda_(i) + shift_;
    Eigen::Map<Eigen::VectorXd>(out.data(), n) = vectors_ * g;
    return;
  }
  // Node (i, j) is entry (i, j) of a column-major (N+1)x(N+1) matrix.
  Eigen::Map<const Eigen::MatrixXd> R(rhs.data(), n, n);
  Eigen::MatrixXd G = vectors_.transpose() * R * vectors_;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) /= lambda_(i) + lambda_(j) + shift_;
  Eigen::Map<Eigen::MatrixXd>(out.data(), n, n).noalias() = vectors_ * G * vectors_.transpose();
}

void TensorSolver::apply_function(std::span<const double> rhs, std::span<double> out,
                                  double (*phi)(double, const void*), const void* ctx) const {
  const Eigen::Index n = side_;
  if (dim_ == 1) {
    Eigen::Map<const Eigen::VectorXd> r(rhs.data(), n);
    Eigen::VectorXd g = vectors_.transpose() * r;
    for (Eigen::Index i = 0; i < n; ++i) g(i) *= phi(lambda_(i), ctx);
    Eigen::Map<Eigen::VectorXd>(out.data(), n) = vectors_ * g;
    return;
  }
  Eigen::Map<const Eigen::MatrixXd> R(rhs.data(), n, n);
  Eigen::MatrixXd G = vectors_.transpose() * R * vectors_;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) *= phi(lambda_(i) + lambda_(j), ctx);
  Eigen::Map<Eigen::MatrixXd>(out.data(), n, n).noalias() = vectors_ * G * vectors_.transpose();
}

}  // namespace fluoinv
