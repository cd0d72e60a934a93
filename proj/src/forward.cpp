#include "fluoinv/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace fluoinv {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (value " << value << ")";
  return os.str();
}

// Sign conditions on sampled data are allowed to miss zero by rounding.
constexpr double kSignSlack = 1e-12;

}  // namespace

ProblemData make_problem(GridPtr grid, GridFunction p, BoundaryData b, double beta, double T, double tau,
                         double M) {
  if (!grid) throw std::invalid_argument("make_problem: null grid");
  if (p.size() != grid->node_count()) throw std::invalid_argument("make_problem: p lives on a different grid");
  if (!(beta > 0.0)) throw std::invalid_argument("make_problem: beta must be positive");
  if (!(T > 0.0) || !(tau > 0.0)) throw std::invalid_argument("make_problem: T and tau must be positive");
  if (!(M > 0.0)) throw std::invalid_argument("make_problem: M must be positive");
  if (!b) throw std::invalid_argument("make_problem: boundary data missing");
  const double ratio = T / tau;
  const int steps = static_cast<int>(std::lround(ratio));
  if (steps < 1 || std::abs(ratio - steps) > 1e-9 * ratio)
    throw std::invalid_argument("make_problem: T / tau must be a positive integer");
  for (std::size_t n = 0; n < p.size(); ++n)
    if (!(p[n] > 0.0)) throw std::invalid_argument(describe("make_problem: p must be positive at every node", p[n]));

  ProblemData d;
  d.grid = grid;
  d.p = std::move(p);
  d.b = std::move(b);
  d.beta = beta;
  d.T = T;
  d.tau = T / steps;
  d.steps = steps;
  d.M = M;
  d.stiffness = std::make_shared<const SparseOperator>(assemble_laplacian(*grid, beta));
  d.mass = std::make_shared<const std::vector<double>>(mass_weights(*grid));

  // Sample b at t_0..t_N on the boundary; derivatives by finite differences.
  const auto boundary = grid->boundary_nodes();
  const std::size_t nb = boundary.size();
  std::vector<std::vector<double>> samples(static_cast<std::size_t>(steps) + 1, std::vector<double>(nb));
  for (int k = 0; k <= steps; ++k)
    for (std::size_t m = 0; m < nb; ++m) samples[k][m] = d.b(grid->coordinate(boundary[m]), k * d.tau);

  double b_max = -INFINITY, bt_max = -INFINITY, btt_max = -INFINITY;
  double b_min = INFINITY, bt_min = INFINITY, btt_min = INFINITY;
  double b_abs = 0.0;
  d.b_min_at_T = INFINITY;
  for (int k = 1; k <= steps; ++k) {
    for (std::size_t m = 0; m < nb; ++m) {
      const double v = samples[k][m];
      double bt;
      double btt;
      if (k < steps) {
        bt = (samples[k + 1][m] - samples[k - 1][m]) / (2.0 * d.tau);
        btt = (samples[k + 1][m] - 2.0 * v + samples[k - 1][m]) / (d.tau * d.tau);
      } else {
        bt = (v - samples[k - 1][m]) / d.tau;
        btt = steps >= 2 ? (v - 2.0 * samples[k - 1][m] + samples[k - 2][m]) / (d.tau * d.tau) : 0.0;
      }
      b_max = std::max(b_max, v);
      bt_max = std::max(bt_max, bt);
      btt_max = std::max(btt_max, btt);
      b_min = std::min(b_min, v);
      bt_min = std::min(bt_min, bt);
      btt_min = std::min(btt_min, btt);
      b_abs = std::max(b_abs, std::abs(v));
    }
  }
  for (std::size_t m = 0; m < nb; ++m) d.b_min_at_T = std::min(d.b_min_at_T, samples[steps][m]);
  d.M_b = std::max({b_max, bt_max, btt_max});

  const double slack = kSignSlack * std::max(1.0, b_abs);
  if (b_min < -slack) d.warnings.push_back(describe("boundary data b is negative somewhere", b_min));
  if (bt_min < -slack / d.tau) d.warnings.push_back(describe("d_t b is negative somewhere", bt_min));
  if (btt_min < -slack / (d.tau * d.tau)) d.warnings.push_back(describe("d_tt b is negative somewhere", btt_min));
  if (b_abs == 0.0) d.warnings.push_back("boundary data b vanishes identically");
  if (!(d.b_min_at_T > 0.0)) d.warnings.push_back(describe("b(., T) is not strictly positive", d.b_min_at_T));

  auto loads = std::make_shared<std::vector<std::vector<double>>>();
  loads->reserve(static_cast<std::size_t>(steps));
  std::vector<double> bvals(grid->node_count(), 0.0);
  for (int k = 1; k <= steps; ++k) {
    for (std::size_t m = 0; m < nb; ++m) bvals[boundary[m]] = samples[k][m];
    loads->push_back(robin_load(*grid, beta, bvals));
  }
  d.loads = std::move(loads);
  return d;
}

GridFunction SpaceTimeField::time_derivative(int level) const {
  if (level < 1 || level > last_level()) throw std::out_of_range("time_derivative: level out of range");
  GridFunction out = at(level) - at(level - 1);
  out *= 1.0 / tau;
  return out;
}

GridFunction SpaceTimeField::second_time_derivative(int level) const {
  if (level < 2 || level > last_level()) throw std::out_of_range("second_time_derivative: level out of range");
  GridFunction out(grid);
  const auto& a = at(level);
  const auto& b = at(level - 1);
  const auto& c = at(level - 2);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = (a[n] - 2.0 * b[n] + c[n]) / (tau * tau);
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Factorisation of M / tau + K + M diag(reaction), constant over all steps.
class StepMatrix {
public:
  StepMatrix(const ProblemData& data, const GridFunction& reaction) : mass_(*data.mass), tau_(data.tau) {
    const auto& K = *data.stiffness;
    const std::size_t n = K.rows();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(K.nonzeros() + n);
    const auto rp = K.row_ptr();
    const auto ci = K.col_idx();
    const auto v = K.values();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k)
        t.emplace_back(static_cast<int>(r), static_cast<int>(ci[k]), v[k]);
    for (std::size_t r = 0; r < n; ++r)
      t.emplace_back(static_cast<int>(r), static_cast<int>(r), mass_[r] * (1.0 / tau_ + reaction[r]));
    SpMat A(static_cast<int>(n), static_cast<int>(n));
    A.setFromTriplets(t.begin(), t.end());
    llt_.compute(A);
    if (llt_.info() != Eigen::Success) throw std::runtime_error("time-step matrix factorisation failed");
    if ((llt_.vectorD().array() <= 0.0).any()) throw std::runtime_error("time-step matrix is not positive definite");
  }

  // Solves for the new level given the previous level and an extra load.
  void step(const GridFunction& prev, std::span<const double> load, GridFunction& next) const {
    const auto n = static_cast<Eigen::Index>(prev.size());
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) rhs(i) = mass_[i] * prev[i] / tau_ + load[i];
    Eigen::Map<Eigen::VectorXd>(next.values().data(), n) = llt_.solve(rhs);
  }

private:
  const std::vector<double>& mass_;
  double tau_;
  Eigen::SimplicialLDLT<SpMat> llt_;
};

void require_nonnegative(const GridFunction& q, const char* who) {
  for (std::size_t n = 0; n < q.size(); ++n)
    if (q[n] < 0.0) throw std::invalid_argument(describe((std::string(who) + ": q is negative at a node").c_str(), q[n]));
}

}  // namespace

SpaceTimeField solve_excitation(const ProblemData& data, const GridFunction& q) {
  data.p.require_same_grid(q);
  require_nonnegative(q, "solve_excitation");
  const StepMatrix step(data, data.p + q);
  SpaceTimeField u{data.grid, data.tau, {}};
  u.levels.reserve(static_cast<std::size_t>(data.steps) + 1);
  u.levels.emplace_back(data.grid, 0.0);
  for (int k = 1; k <= data.steps; ++k) {
    GridFunction next(data.grid);
    step.step(u.levels.back(), (*data.loads)[static_cast<std::size_t>(k - 1)], next);
    u.levels.push_back(std::move(next));
  }
  return u;
}

SpaceTimeField solve_emission(const ProblemData& data, const GridFunction& q, const SpaceTimeField& u_e) {
  data.p.require_same_grid(q);
  if (!u_e.grid || !u_e.grid->same_shape(*data.grid) || u_e.last_level() != data.steps ||
      std::abs(u_e.tau - data.tau) > 1e-15 * data.tau)
    throw std::invalid_argument("solve_emission: excitation field lives on a different space-time grid");
  const StepMatrix step(data, data.p);
  const auto& mass = *data.mass;
  std::vector<double> source(q.size());
  SpaceTimeField u{data.grid, data.tau, {}};
  u.levels.reserve(static_cast<std::size_t>(data.steps) + 1);
  u.levels.emplace_back(data.grid, 0.0);
  for (int k = 1; k <= data.steps; ++k) {
    const auto& ue = u_e.at(k);
    for (std::size_t n = 0; n < source.size(); ++n) source[n] = mass[n] * q[n] * ue[n];
    GridFunction next(data.grid);
    step.step(u.levels.back(), source, next);
    u.levels.push_back(std::move(next));
  }
  return u;
}

ForwardSolution solve_forward(const ProblemData& data, const GridFunction& q) {
  auto ue = solve_excitation(data, q);
  auto um = solve_emission(data, q, ue);
  return {std::move(ue), std::move(um)};
}

GridFunction terminal_data(const SpaceTimeField& u) {
  if (u.levels.empty()) throw std::invalid_argument("terminal_data: empty field");
  return u.levels.back();
}

GridFunction terminal_time_derivative(const SpaceTimeField& u) {
  if (u.levels.size() < 2) throw std::invalid_argument("terminal_time_derivative: need at least two time levels");
  return u.time_derivative(u.last_level());
}

GridFunction robin_neg_laplacian(const SparseOperator& stiffness, std::span<const double> mass,
                                 const GridFunction& g) {
  GridFunction out = stiffness.apply(g);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] /= mass[n];
  return out;
}

GridFunction robin_neg_laplacian(double beta, const GridFunction& g) {
  const auto K = assemble_laplacian(g.grid(), beta);
  const auto w = mass_weights(g.grid());
  return robin_neg_laplacian(K, w, g);
}

EllipticSolver::EllipticSolver(GridPtr grid, double beta, EllipticBackend backend, double cg_tol)
    : grid_(std::move(grid)),
      beta_(beta),
      backend_(backend),
      cg_tol_(cg_tol > 0.0 ? cg_tol : default_solver_tol()),
      mass_(mass_weights(*grid_)),
      stiffness_(assemble_laplacian(*grid_, beta)) {
  if (backend_ == EllipticBackend::FastDiagonalization)
    fast_ = std::make_unique<TensorSolver>(*grid_, stencil_1d(grid_->cells_per_side(), beta_), 0.0);
}

void EllipticSolver::solve_stiffness(std::span<const double> rhs, std::span<double> out) const {
  if (fast_) {
    fast_->solve(rhs, out);
    return;
  }
  GridFunction r(grid_, std::vector<double>(rhs.begin(), rhs.end()));
  auto [x, report] = cg_solve(stiffness_, r, cg_tol_);
  if (!report.converged) throw std::runtime_error("EllipticSolver: CG did not converge");
  std::copy(x.values().begin(), x.values().end(), out.begin());
}

void EllipticSolver::apply(std::span<const double> in, std::span<double> out) const {
  std::vector<double> rhs(in.size());
  for (std::size_t n = 0; n < in.size(); ++n) rhs[n] = mass_[n] * in[n];
  solve_stiffness(rhs, out);
}

GridFunction EllipticSolver::apply(const GridFunction& f) const {
  GridFunction out(grid_);
  apply(f.values(), out.values());
  return out;
}

void EllipticSolver::apply_transpose(std::span<const double> in, std::span<double> out) const {
  solve_stiffness(in, out);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= mass_[n];
}

GridFunction elliptic_solve(const GridPtr& grid, double beta, const GridFunction& f, EllipticBackend backend) {
  const EllipticSolver solver(grid, beta, backend);
  return solver.apply(f);
}

std::vector<std::size_t> potential_condition_violations(const ProblemData& data, const GridFunction& g) {
  const auto neg_lap = robin_neg_laplacian(*data.stiffness, *data.mass, g);
  std::vector<std::size_t> bad;
  for (std::size_t n = 0; n < g.size(); ++n) {
    // p >= Lap g / g  <=>  p g + (-Lap g) >= 0 for g > 0
    const double slack = 1e-10 * std::max(1.0, std::abs(data.p[n] * g[n]));
    if (!(g[n] > 0.0) || data.p[n] * g[n] + neg_lap[n] < -slack) bad.push_back(n);
  }
  return bad;
}

}  // namespace fluoinv
