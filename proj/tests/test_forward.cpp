#include <gtest/gtest.h>

#include <cmath>

#include "fluoinv/experiments.hpp"
#include "fluoinv/forward.hpp"
#include "fluoinv/metrics.hpp"
#include "support.hpp"

using namespace fluoinv;
namespace ts = testing_support;

namespace {

// Dense finite-difference operator written from the pointwise stencil:
// interior (2u_i - u_{i-1} - u_{i+1}) / h^2 per direction, and on a face the
// ghost value u_{-1} = u_1 - 2h (b - u_0) / beta from beta du/dn + u = b.
// Returns L and the boundary coupling c with (-Lap u)_n = (L u)_n - c_n b_n.
struct DenseRobin {
  ts::Dense L;
  std::vector<double> coupling;
};

DenseRobin dense_robin(const Grid& g, double beta) {
  const int N = g.cells_per_side();
  const double h = g.spacing();
  const std::size_t n = g.node_count();
  DenseRobin out{ts::Dense(n, std::vector<double>(n, 0.0)), std::vector<double>(n, 0.0)};
  auto direction = [&](std::size_t node, int i, auto neighbour) {
    out.L[node][node] += 2.0 / (h * h);
    if (i == 0 || i == N) {
      const std::size_t inner = neighbour(i == 0 ? 1 : N - 1);
      out.L[node][inner] -= 2.0 / (h * h);
      out.L[node][node] += 2.0 / (beta * h);
      out.coupling[node] += 2.0 / (beta * h);
    } else {
      out.L[node][neighbour(i - 1)] -= 1.0 / (h * h);
      out.L[node][neighbour(i + 1)] -= 1.0 / (h * h);
    }
  };
  for (std::size_t node = 0; node < n; ++node) {
    const int i = g.ix(node), j = g.iy(node);
    direction(node, i, [&](int ii) { return g.index(ii, j); });
    if (g.dim() == 2) direction(node, j, [&](int jj) { return g.index(i, jj); });
  }
  return out;
}

// Backward Euler with dense elimination, the oracle for both fields.
std::pair<std::vector<double>, std::vector<double>> dense_forward(const ProblemSpec& spec, const SpatialFunction& q) {
  const auto g = make_grid(spec.dim, spec.cells);
  const auto R = dense_robin(*g, spec.beta);
  const std::size_t n = g->node_count();
  const int steps = static_cast<int>(std::lround(spec.T / spec.tau));
  auto step_matrix = [&](bool with_q) {
    auto A = R.L;
    for (std::size_t r = 0; r < n; ++r) {
      const Point p = g->coordinate(r);
      A[r][r] += 1.0 / spec.tau + spec.p(p) + (with_q ? q(p) : 0.0);
    }
    return A;
  };
  const auto Ae = step_matrix(true), Am = step_matrix(false);
  std::vector<double> ue(n, 0.0), um(n, 0.0), rhs(n);
  for (int k = 1; k <= steps; ++k) {
    const double t = k * spec.tau;
    for (std::size_t r = 0; r < n; ++r) {
      const Point p = g->coordinate(r);
      rhs[r] = ue[r] / spec.tau + (g->is_boundary(r) ? R.coupling[r] * spec.b(p, t) : 0.0);
    }
    ue = ts::gauss_solve(Ae, rhs);
    for (std::size_t r = 0; r < n; ++r) rhs[r] = um[r] / spec.tau + q(g->coordinate(r)) * ue[r];
    um = ts::gauss_solve(Am, rhs);
  }
  return {ue, um};
}

ProblemSpec small_example2(int dim = 2, int cells = 8) {
  ProblemSpec s;
  s.dim = dim;
  s.cells = cells;
  s.T = 0.2;
  s.tau = 0.02;
  s.beta = 0.6;
  return s;
}

}  // namespace

TEST(Forward, MatchesDenseBackwardEulerOracle) {
  for (int dim : {1, 2}) {
    const auto spec = small_example2(dim, dim == 1 ? 16 : 8);
    const auto data = build_problem(spec);
    const auto q = GridFunction::from(data.grid, example2_smooth_source);
    const auto sol = solve_forward(data, q);
    const auto [ue, um] = dense_forward(spec, example2_smooth_source);
    const auto ueT = terminal_data(sol.excitation), umT = terminal_data(sol.emission);
    EXPECT_LT(ts::max_abs_diff(ueT.values(), ue), 1e-11 * ts::max_abs(ue)) << "dim " << dim;
    EXPECT_LT(ts::max_abs_diff(umT.values(), um), 1e-11 * ts::max_abs(um)) << "dim " << dim;
  }
}

TEST(Forward, TimeStepRefinementIsFirstOrder) {
  // Differences between successive halvings of tau shrink by about 2.
  auto terminal = [](double tau) {
    ProblemSpec s = small_example2(2, 8);
    s.tau = tau;
    const auto data = build_problem(s);
    return terminal_data(solve_excitation(data, GridFunction::from(data.grid, example2_smooth_source)));
  };
  const auto a = terminal(0.02), b = terminal(0.01), c = terminal(0.005);
  const double ratio = l2_norm(a - b) / l2_norm(b - c);
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Forward, ConservationIdentityIndependentOfQ) {
  const auto data = build_problem(small_example2());
  const auto q1 = GridFunction::from(data.grid, example2_smooth_source);
  const auto q2 = GridFunction::from(data.grid, [](Point p) { return 0.3 + 4.0 * p.x * p.y; });
  const auto s1 = solve_forward(data, q1), s2 = solve_forward(data, q2);
  for (int k = 1; k <= s1.excitation.last_level(); ++k) {
    const auto sum1 = s1.excitation.at(k) + s1.emission.at(k);
    const auto sum2 = s2.excitation.at(k) + s2.emission.at(k);
    EXPECT_LT(ts::max_abs_diff(sum1.values(), sum2.values()), 1e-12 * ts::max_abs(sum1.values()));
  }
}

TEST(Forward, ZeroSourceGivesZeroEmission) {
  const auto data = build_problem(small_example2());
  const auto sol = solve_forward(data, GridFunction(data.grid, 0.0));
  EXPECT_EQ(ts::max_abs(terminal_data(sol.emission).values()), 0.0);
  EXPECT_GT(terminal_data(sol.excitation).min(), 0.0);
}

TEST(Forward, PositivityAndMonotoneInSource) {
  const auto data = build_problem(small_example2());
  const auto q1 = GridFunction(data.grid, 0.5);
  const auto q2 = GridFunction(data.grid, 2.0);
  const auto s1 = solve_forward(data, q1), s2 = solve_forward(data, q2);
  for (int k = 1; k <= s1.excitation.last_level(); ++k) {
    EXPECT_GE(s1.excitation.at(k).min(), 0.0);
    EXPECT_GE(s1.emission.at(k).min(), 0.0);
    EXPECT_GE((s1.excitation.at(k) - s2.excitation.at(k)).min(), -1e-14);
  }
}

TEST(Forward, ValidatesInputs) {
  auto spec = small_example2();
  spec.tau = 0.03;
  EXPECT_THROW(build_problem(spec), std::invalid_argument);
  spec = small_example2();
  spec.beta = 0.0;
  EXPECT_THROW(build_problem(spec), std::invalid_argument);
  spec = small_example2();
  spec.p = [](Point) { return 0.0; };
  EXPECT_THROW(build_problem(spec), std::invalid_argument);
  const auto data = build_problem(small_example2());
  EXPECT_THROW(solve_excitation(data, GridFunction(data.grid, -1.0)), std::invalid_argument);
  EXPECT_THROW(solve_excitation(data, GridFunction(make_grid(2, 9), 1.0)), std::invalid_argument);
}

TEST(Forward, SignConditionWarnings) {
  EXPECT_TRUE(build_problem(small_example2()).warnings.empty());
  auto spec = small_example2();
  spec.b = [](Point p, double t) { return -example2_boundary(p, t); };
  EXPECT_FALSE(build_problem(spec).warnings.empty());
  spec.b = [](Point, double t) { return 2.0 - t; };  // decreasing in time
  EXPECT_FALSE(build_problem(spec).warnings.empty());
}

TEST(Forward, BoundMbOfExampleTwo) {
  // max over the boundary of b = (x+y)^2 t + 5 at t = T plus derivatives.
  const auto data = build_problem(small_example2());
  EXPECT_NEAR(data.M_b, 4.0 * 0.2 + 5.0, 1e-12);
}

TEST(EllipticSolver, BackendsAgreeWithDenseSolve) {
  const auto g = make_grid(2, 8);
  const EllipticSolver fast(g, 0.7, EllipticBackend::FastDiagonalization);
  const EllipticSolver cg(g, 0.7, EllipticBackend::ConjugateGradient, 1e-13);
  const auto f = GridFunction(g, ts::random_vector(g->node_count(), 31));
  const auto a = fast.apply(f), b = cg.apply(f);
  // Oracle: K u = M f.
  const auto K = assemble_laplacian(*g, 0.7);
  const auto w = mass_weights(*g);
  std::vector<double> mf(f.size());
  for (std::size_t n = 0; n < mf.size(); ++n) mf[n] = w[n] * f[n];
  const auto oracle = ts::gauss_solve(ts::dense_of(K.rows(), [&](auto x, auto y) { K.apply(x, y); }), mf);
  EXPECT_LT(ts::max_abs_diff(a.values(), oracle), 1e-11 * ts::max_abs(oracle));
  EXPECT_LT(ts::max_abs_diff(b.values(), oracle), 1e-9 * ts::max_abs(oracle));
}

TEST(EllipticSolver, SelfAdjointInMassInnerProductAndTranspose) {
  const auto g = make_grid(2, 12);
  const EllipticSolver S(g, 1.0);
  const auto w = mass_weights(*g);
  const auto f = ts::random_vector(g->node_count(), 32), h = ts::random_vector(g->node_count(), 33);
  std::vector<double> Sf(f.size()), Sh(f.size()), StF(f.size());
  S.apply(f, Sf);
  S.apply(h, Sh);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    lhs += w[n] * Sf[n] * h[n];
    rhs += w[n] * f[n] * Sh[n];
  }
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
  // Euclidean adjoint: <S f, h> = <f, S^T h>.
  S.apply_transpose(h, StF);
  EXPECT_NEAR(ts::dot(Sf, h), ts::dot(f, StF), 1e-12 * std::abs(ts::dot(Sf, h)));
}

TEST(EllipticSolver, InvertsRobinLaplacianOnData) {
  // S(-Lap g) = g for any nodal g, since both use the same operator.
  const auto g = make_grid(2, 20);
  const auto u = GridFunction::from(g, [](Point p) { return std::exp(p.x) * std::cos(p.y); });
  const EllipticSolver S(g, 1.0);
  const auto back = S.apply(robin_neg_laplacian(1.0, u));
  EXPECT_LT(ts::max_abs_diff(back.values(), u.values()), 1e-10);
}

TEST(Forward, PotentialConditionHoldsForExampleTwo) {
  const auto data = build_problem(small_example2());
  const auto g = terminal_data(solve_forward(data, GridFunction::from(data.grid, example2_smooth_source)).emission);
  EXPECT_TRUE(potential_condition_violations(data, g).empty());
}
