#include "fluoinv/metrics.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "fluoinv/kernels.hpp"
#include "fluoinv/sparse.hpp"
#include "fluoinv/tensor_solver.hpp"

namespace fluoinv {

namespace {

// Riesz solvers are costly to build (a dense 1D eigenproblem), so keep one per
// grid shape.
const TensorSolver& riesz_solver(const Grid& grid) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<TensorSolver>> cache;
  const std::lock_guard lock(mu);
  auto& slot = cache[{grid.dim(), grid.cells_per_side()}];
  if (!slot) slot = std::make_unique<TensorSolver>(grid, stencil_1d(grid.cells_per_side(), 0.0), 1.0);
  return *slot;
}

double relative(double num, double den, const char* what) {
  if (!(den > 0.0)) throw std::domain_error(std::string("error_bundle: zero denominator in ") + what);
  return num / den;
}

}  // namespace

double l2_norm(const GridFunction& u) {
  const auto w = mass_weights(u.grid());
  return std::sqrt(kernels::weighted_dot(w, u.values(), u.values()));
}

double h1_norm(const GridFunction& u) {
  const auto A = assemble_neumann_stiffness(u.grid());
  const auto Au = A.apply(u);
  const double grad2 = kernels::dot(u.values(), Au.values());
  const double l2 = l2_norm(u);
  return std::sqrt(l2 * l2 + std::max(grad2, 0.0));
}

GridFunction h1_riesz(const GridFunction& v) {
  const auto w = mass_weights(v.grid());
  std::vector<double> rhs(v.size());
  kernels::hadamard(w, v.values(), rhs);
  GridFunction out(v.grid_ptr());
  riesz_solver(v.grid()).solve(rhs, out.values());
  return out;
}

double dual_h1_norm(const GridFunction& v) {
  const auto r = h1_riesz(v);
  const auto w = mass_weights(v.grid());
  return std::sqrt(std::max(kernels::weighted_dot(w, v.values(), r.values()), 0.0));
}

double empirical_norm(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_norm: no values");
  return std::sqrt(kernels::dot(values, values) / static_cast<double>(values.size()));
}

ErrorBundle error_bundle(const ErrorInputs& in) {
  ErrorBundle e;
  if (!in.Sf_rec_at_points.empty() && !in.Sf_true_at_points.empty()) {
    if (in.Sf_rec_at_points.size() != in.Sf_true_at_points.size())
      throw std::invalid_argument("error_bundle: sample vectors differ in length");
    std::vector<double> d(in.Sf_rec_at_points.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = in.Sf_rec_at_points[i] - in.Sf_true_at_points[i];
    e.err1 = relative(empirical_norm(d), empirical_norm(in.Sf_true_at_points), "Err1");
  }
  if (in.f_rec && in.f_true) {
    const auto d = *in.f_rec - *in.f_true;
    e.err2 = relative(dual_h1_norm(d), dual_h1_norm(*in.f_true), "Err2");
    e.err3 = relative(l2_norm(d), l2_norm(*in.f_true), "Err3");
  }
  if (in.q_rec && in.q_true) {
    const auto d = *in.q_rec - *in.q_true;
    e.err4 = relative(dual_h1_norm(d), dual_h1_norm(*in.q_true), "Err4");
    e.err5 = relative(l2_norm(d), l2_norm(*in.q_true), "Err5");
  }
  return e;
}

}  // namespace fluoinv
