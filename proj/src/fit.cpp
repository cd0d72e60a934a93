#include "fluoinv/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fluoinv/kernels.hpp"
#include "fluoinv/metrics.hpp"

namespace fluoinv {

PointEvaluation::PointEvaluation(GridPtr grid, std::span<const Point> points)
    : grid_(std::move(grid)), count_(points.size()) {
  if (!grid_) throw std::invalid_argument("PointEvaluation: null grid");
  const int N = grid_->cells_per_side();
  const double h = grid_->spacing();
  nodes_.assign(count_ * kStencil, 0);
  weights_.assign(count_ * kStencil, 0.0);
  auto locate = [&](double t, int& cell, double& frac) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("PointEvaluation: point outside the closed domain");
    cell = std::min(static_cast<int>(t / h), N - 1);
    frac = std::clamp(t / h - cell, 0.0, 1.0);
  };
  for (std::size_t k = 0; k < count_; ++k) {
    int i = 0;
    int j = 0;
    double tx = 0.0;
    double ty = 0.0;
    locate(points[k].x, i, tx);
    if (grid_->dim() == 2) locate(points[k].y, j, ty);
    auto* nd = &nodes_[k * kStencil];
    auto* wt = &weights_[k * kStencil];
    if (grid_->dim() == 1) {
      nd[0] = grid_->index(i);
      nd[1] = grid_->index(i + 1);
      wt[0] = 1.0 - tx;
      wt[1] = tx;
      nd[2] = nd[3] = nd[0];
    } else {
      nd[0] = grid_->index(i, j);
      nd[1] = grid_->index(i + 1, j);
      nd[2] = grid_->index(i, j + 1);
      nd[3] = grid_->index(i + 1, j + 1);
      wt[0] = (1.0 - tx) * (1.0 - ty);
      wt[1] = tx * (1.0 - ty);
      wt[2] = (1.0 - tx) * ty;
      wt[3] = tx * ty;
    }
  }
}

void PointEvaluation::apply(std::span<const double> nodal, std::span<double> out) const {
  for (std::size_t k = 0; k < count_; ++k) {
    double v = 0.0;
    for (int m = 0; m < kStencil; ++m) v += weights_[k * kStencil + m] * nodal[nodes_[k * kStencil + m]];
    out[k] = v;
  }
}

std::vector<double> PointEvaluation::apply(const GridFunction& u) const {
  std::vector<double> out(count_);
  apply(u.values(), out);
  return out;
}

void PointEvaluation::adjoint(std::span<const double> y, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < count_; ++k)
    for (int m = 0; m < kStencil; ++m) out[nodes_[k * kStencil + m]] += weights_[k * kStencil + m] * y[k];
}

namespace {

void check_order(int s) {
  if (s != 0 && s != 1) throw std::invalid_argument("penalty order s must be 0 or 1");
}

struct PrecondParams {
  double lambda;
  int s;
};

// Inverse symbol of lambda R + M K^{-1} M K^{-1} M in the Robin eigenbasis,
// i.e. the normal operator with (1/n) E^T E replaced by the mass.
double precond_symbol(double mu, const void* ctx) {
  const auto* p = static_cast<const PrecondParams*>(ctx);
  const double reg = p->s == 0 ? p->lambda : p->lambda * (1.0 + mu);
  return 1.0 / (reg + 1.0 / (mu * mu));
}

}  // namespace

SmoothingFit::SmoothingFit(GridPtr grid, double beta, std::span<const Point> points)
    : grid_(grid),
      S_(grid, beta),
      E_(grid, points),
      neumann_(assemble_neumann_stiffness(*grid)),
      riesz_(*grid, stencil_1d(grid->cells_per_side(), 0.0), 1.0),
      robin_(*grid, stencil_1d(grid->cells_per_side(), beta), 0.0) {
  if (points.empty()) throw std::invalid_argument("SmoothingFit: no measurement points");
}

void SmoothingFit::gram(int s, std::span<const double> f, std::span<double> out) const {
  check_order(s);
  const auto m = S_.mass();
  if (s == 1) {
    neumann_.apply(f, out);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] += m[k] * f[k];
  } else {
    kernels::hadamard(m, f, out);
  }
}

void SmoothingFit::gram_inverse(int s, std::span<const double> r, std::span<double> out) const {
  check_order(s);
  if (s == 1) {
    riesz_.solve(r, out);
    return;
  }
  const auto m = S_.mass();
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = r[k] / m[k];
}

double SmoothingFit::penalty(int s, std::span<const double> f) const {
  std::vector<double> Rf(f.size());
  gram(s, f, Rf);
  return kernels::dot(f, Rf);
}

void SmoothingFit::normal_operator(int s, double lambda, std::span<const double> f, std::span<double> out) const {
  const std::size_t N = f.size();
  const std::size_t n = E_.size();
  std::vector<double> Sf(N), ESf(n), adj(N);
  S_.apply(f, Sf);
  E_.apply(Sf, ESf);
  E_.adjoint(ESf, adj);
  S_.apply_transpose(adj, out);
  gram(s, f, Sf);  // reuse Sf as workspace for R f
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < N; ++k) out[k] = inv_n * out[k] + lambda * Sf[k];
}

double SmoothingFit::objective(std::span<const double> values, int s, double lambda,
                               std::span<const double> f) const {
  std::vector<double> Sf(f.size()), ESf(E_.size());
  S_.apply(f, Sf);
  E_.apply(Sf, ESf);
  for (std::size_t k = 0; k < ESf.size(); ++k) ESf[k] -= values[k];
  const double mis = empirical_norm(ESf);
  return mis * mis + lambda * penalty(s, f);
}

FitResult SmoothingFit::solve(std::span<const double> values, const FitConfig& cfg, const GridFunction* warm) const {
  check_order(cfg.s);
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("solve_p1: lambda must be positive");
  if (values.size() != E_.size()) throw std::invalid_argument("solve_p1: value count differs from point count");
  const std::size_t N = grid_->node_count();
  const std::size_t n = E_.size();

  std::vector<double> rhs(N), scatter(N);
  E_.adjoint(values, scatter);
  S_.apply_transpose(scatter, rhs);
  for (auto& v : rhs) v /= static_cast<double>(n);

  FitResult res;
  res.lambda = cfg.lambda;
  res.s = cfg.s;
  res.f = warm ? *warm : GridFunction(grid_);
  res.f.require_same_grid(GridFunction(grid_));

  const PrecondParams pp{cfg.lambda, cfg.s};
  const LinearMap A = [&](std::span<const double> in, std::span<double> out) {
    normal_operator(cfg.s, cfg.lambda, in, out);
  };
  const LinearMap P = [&](std::span<const double> in, std::span<double> out) {
    robin_.apply_function(in, out, &precond_symbol, &pp);
  };
  const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : static_cast<int>(10 * N);
  res.report = conjugate_gradient(A, P, rhs, res.f.values(), cfg.tol, max_iter);

  res.Sf = S_.apply(res.f);
  auto at = E_.apply(res.Sf);
  for (std::size_t k = 0; k < n; ++k) at[k] -= values[k];
  res.misfit = empirical_norm(at);
  res.penalty_norm = std::sqrt(std::max(penalty(cfg.s, res.f.values()), 0.0));
  return res;
}

FitResult solve_p1(const GridPtr& grid, double beta, const MeasurementSet& meas, const FitConfig& cfg) {
  const SmoothingFit fitter(grid, beta, meas.points);
  return fitter.solve(meas.values, cfg);
}

double lambda_exponent(int s) {
  check_order(s);
  return 0.5 + 1.0 / (4.0 + 2.0 * s);
}

double optimal_lambda_prior(double norm_f_star, double sigma, std::size_t n, int s) {
  if (!(norm_f_star > 0.0)) throw std::invalid_argument("optimal_lambda_prior: |f*| must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("optimal_lambda_prior: sigma must be positive");
  if (n < 1) throw std::invalid_argument("optimal_lambda_prior: n must be at least 1");
  return std::pow(sigma / std::sqrt(static_cast<double>(n)) / norm_f_star, 1.0 / lambda_exponent(s));
}

LambdaSearch self_consistent_lambda(const SmoothingFit& fitter, std::span<const double> values, int s,
                                    double stop_tol, int max_outer, double cg_tol) {
  const double a = lambda_exponent(s);
  const double root_n = std::sqrt(static_cast<double>(values.size()));
  LambdaSearch out;
  double lambda = std::pow(1.0 / root_n, 1.0 / a);
  out.trace.push_back(lambda);
  const GridFunction* warm = nullptr;
  FitResult fit;
  for (int j = 0; j < max_outer; ++j) {
    fit = fitter.solve(values, FitConfig{s, lambda, cg_tol, 0}, warm);
    if (!(fit.penalty_norm > 0.0)) throw std::domain_error("self_consistent_lambda: fit vanished, |f| = 0");
    const double next = std::pow(fit.misfit / root_n / fit.penalty_norm, 1.0 / a);
    out.trace.push_back(next);
    out.outer_iterations = j + 1;
    const double step = std::abs(lambda - next);
    lambda = next;
    warm = &fit.f;
    if (step < stop_tol) {
      out.converged = true;
      break;
    }
    if (!(lambda > 0.0)) break;
  }
  out.lambda = lambda;
  out.last_loop_fit = fit;
  if (lambda > 0.0) out.fit = fitter.solve(values, FitConfig{s, lambda, cg_tol, 0}, &out.last_loop_fit.f);
  return out;
}

LambdaSearch self_consistent_lambda(const GridPtr& grid, double beta, const MeasurementSet& meas, int s,
                                    double stop_tol, int max_outer) {
  const SmoothingFit fitter(grid, beta, meas.points);
  return self_consistent_lambda(fitter, meas.values, s, stop_tol, max_outer);
}

}  // namespace fluoinv
