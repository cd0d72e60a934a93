#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fluoinv/forward.hpp"
#include "fluoinv/inverse.hpp"

namespace fluoinv {

using SpatialFunction = std::function<double(Point)>;

/// f*(x, y) = sin(2 pi x) sin(2 pi y) (1D: sin(2 pi x)).
double example1_source(Point pt, int dim);

/// Example 1 truth: f* and the noise-free data S f* on one grid.
struct SmoothingTruth {
  GridPtr grid;
  double beta = 1.0;
  GridFunction f_true;
  GridFunction Sf_true;
};
SmoothingTruth make_example1(int dim, int cells, double beta);

/// b = (x + y)^2 t + 5, p = x + y + 10.
double example2_boundary(Point pt, double t);
double example2_background(Point pt);
/// 2 + cos(2 pi x) cos(2 pi y).
double example2_smooth_source(Point pt);
/// Two disks and an annulus of height 1.
double example2_discontinuous_source(Point pt);

struct ProblemSpec {
  int dim = 2;
  int cells = 100;
  double beta = 1.0;
  double T = 1.0;
  double tau = 0.01;
  double M = 5.0;
  SpatialFunction p = example2_background;
  BoundaryData b = example2_boundary;
};
ProblemData build_problem(const ProblemSpec& spec);

/// Clean data for P2: g = u_m(T; q*), f* = -Lap g (so S f* = g exactly).
struct InverseTruth {
  std::shared_ptr<const ProblemData> problem;
  GridFunction q_true;
  GridFunction g;
  GridFunction f_true;
};
InverseTruth make_inverse_truth(const ProblemSpec& spec, const SpatialFunction& q_star);

/// Noise level relative to the data: sigma = level * max |g|.
double relative_sigma(const GridFunction& g, double level);

}  // namespace fluoinv
