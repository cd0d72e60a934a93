#include "fluoinv/cg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fluoinv/kernels.hpp"

namespace fluoinv {

SolveReport conjugate_gradient(const LinearMap& A, const LinearMap& precond, std::span<const double> rhs,
                               std::span<double> x, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("conjugate_gradient: tol must be positive");
  const std::size_t n = rhs.size();
  if (x.size() != n) throw std::invalid_argument("conjugate_gradient: size mismatch");

  SolveReport report;
  const double bnorm = kernels::norm2(rhs);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    report.converged = true;
    report.residual_history.push_back(0.0);
    return report;
  }

  std::vector<double> r(n), z(n), p(n), Ap(n), best(x.begin(), x.end());
  A(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
  double rel = kernels::norm2(r) / bnorm;
  double best_rel = rel;
  report.residual_history.push_back(best_rel);

  auto apply_precond = [&](std::span<const double> in, std::span<double> out) {
    if (precond)
      precond(in, out);
    else
      std::copy(in.begin(), in.end(), out.begin());
  };

  if (rel <= tol) {
    report.residual = rel;
    report.converged = true;
    return report;
  }

  apply_precond(r, z);
  p = z;
  double rz = kernels::dot(r, z);
  int it = 0;
  while (it < max_iter) {
    A(p, Ap);
    const double pAp = kernels::dot(p, Ap);
    if (!(pAp > 0.0)) break;  // breakdown: operator not SPD on this direction
    const double alpha = rz / pAp;
    kernels::axpy(alpha, p, x);
    kernels::axpy(-alpha, Ap, r);
    ++it;
    rel = kernels::norm2(r) / bnorm;
    if (rel < best_rel) {
      best_rel = rel;
      std::copy(x.begin(), x.end(), best.begin());
    }
    report.residual_history.push_back(best_rel);
    if (rel <= tol) break;
    apply_precond(r, z);
    const double rz_new = kernels::dot(r, z);
    kernels::xpby(z, rz_new / rz, p);
    rz = rz_new;
  }
  if (rel > best_rel) std::copy(best.begin(), best.end(), x.begin());
  report.iterations = it;
  report.residual = best_rel;
  report.converged = best_rel <= tol;
  return report;
}

std::pair<GridFunction, SolveReport> cg_solve(const SparseOperator& A, const GridFunction& rhs, double tol,
                                              int max_iter) {
  if (A.rows() != rhs.size()) throw std::invalid_argument("cg_solve: operator and rhs sizes differ");
  const auto diag = A.diagonal_values();
  for (double d : diag)
    if (!(d > 0.0)) throw std::invalid_argument("cg_solve: operator has a nonpositive diagonal entry");
  if (max_iter <= 0) max_iter = static_cast<int>(10 * A.rows());
  GridFunction x(rhs.grid_ptr());
  const LinearMap op = [&](std::span<const double> in, std::span<double> out) { A.apply(in, out); };
  const LinearMap jacobi = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / diag[i];
  };
  auto report = conjugate_gradient(op, jacobi, rhs.values(), x.values(), tol, max_iter);
  return {std::move(x), std::move(report)};
}

double default_solver_tol() {
  if (const char* env = std::getenv("SOLVER_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) return v;
  }
  return 1e-10;
}

}  // namespace fluoinv
