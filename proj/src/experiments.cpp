#include "fluoinv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fluoinv {

double example1_source(Point pt, int dim) {
  const double sx = std::sin(2.0 * std::numbers::pi * pt.x);
  return dim == 1 ? sx : sx * std::sin(2.0 * std::numbers::pi * pt.y);
}

SmoothingTruth make_example1(int dim, int cells, double beta) {
  SmoothingTruth t;
  t.grid = make_grid(dim, cells);
  t.beta = beta;
  t.f_true = GridFunction::from(t.grid, [dim](Point pt) { return example1_source(pt, dim); });
  t.Sf_true = elliptic_solve(t.grid, beta, t.f_true, EllipticBackend::FastDiagonalization);
  return t;
}

double example2_boundary(Point pt, double t) {
  const double s = pt.x + pt.y;
  return s * s * t + 5.0;
}

double example2_background(Point pt) { return pt.x + pt.y + 10.0; }

double example2_smooth_source(Point pt) {
  return 2.0 + std::cos(2.0 * std::numbers::pi * pt.x) * std::cos(2.0 * std::numbers::pi * pt.y);
}

double example2_discontinuous_source(Point pt) {
  auto dist = [&](double cx, double cy) { return std::hypot(pt.x - cx, pt.y - cy); };
  if (dist(0.3, 0.8) <= 0.1) return 1.0;
  if (dist(0.7, 0.8) <= 0.1) return 1.0;
  const double r = dist(0.4, 0.5);
  if (r >= 0.2 && r <= 0.3) return 1.0;
  return 0.0;
}

ProblemData build_problem(const ProblemSpec& spec) {
  auto grid = make_grid(spec.dim, spec.cells);
  auto p = GridFunction::from(grid, spec.p);
  return make_problem(grid, std::move(p), spec.b, spec.beta, spec.T, spec.tau, spec.M);
}

InverseTruth make_inverse_truth(const ProblemSpec& spec, const SpatialFunction& q_star) {
  InverseTruth t;
  auto data = std::make_shared<ProblemData>(build_problem(spec));
  t.q_true = GridFunction::from(data->grid, q_star);
  t.g = forward_map(*data, t.q_true);
  t.f_true = robin_neg_laplacian(*data->stiffness, *data->mass, t.g);
  t.problem = std::move(data);
  return t;
}

double relative_sigma(const GridFunction& g, double level) {
  double m = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) m = std::max(m, std::abs(g[n]));
  return level * m;
}

}  // namespace fluoinv
