#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fluoinv/metrics.hpp"
#include "fluoinv/sparse.hpp"

using namespace fluoinv;
using std::numbers::pi;

TEST(Metrics, L2NormOfSineProduct) {
  // The trapezoid rule is exact for this trigonometric product.
  const auto u = GridFunction::from(make_grid(2, 40), [](Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); });
  EXPECT_NEAR(l2_norm(u), 0.5, 1e-14);
}

TEST(Metrics, H1NormOfConstantEqualsL2) {
  const auto u = GridFunction(make_grid(2, 10), 3.0);
  EXPECT_NEAR(h1_norm(u), 3.0, 1e-13);
  EXPECT_NEAR(l2_norm(u), 3.0, 1e-13);
}

TEST(Metrics, DualNormOfNeumannEigenfunction) {
  // cos(k pi x) cos(l pi y) is a discrete eigenfunction of M^{-1} A with
  // eigenvalue mu_h, so its dual norm is |v| / sqrt(1 + mu_h).
  const int N = 32;
  const double h = 1.0 / N;
  const int k = 2, l = 3;
  const auto v = GridFunction::from(make_grid(2, N), [&](Point p) { return std::cos(k * pi * p.x) * std::cos(l * pi * p.y); });
  auto mu1 = [&](int m) { return 4.0 / (h * h) * std::pow(std::sin(m * pi * h / 2.0), 2); };
  const double mu = mu1(k) + mu1(l);
  EXPECT_NEAR(dual_h1_norm(v), l2_norm(v) / std::sqrt(1.0 + mu), 1e-12);
  EXPECT_NEAR(h1_norm(v), l2_norm(v) * std::sqrt(1.0 + mu), 1e-10);
}

TEST(Metrics, DualNormBoundedByL2) {
  const auto g = make_grid(2, 16);
  for (int seed = 0; seed < 5; ++seed) {
    const auto v = GridFunction::from(g, [&](Point p) { return std::sin(7.0 * p.x + seed) * std::exp(p.y * seed); });
    EXPECT_LE(dual_h1_norm(v), l2_norm(v) * (1.0 + 1e-14));
    EXPECT_LE(l2_norm(v), h1_norm(v) * (1.0 + 1e-14));
  }
}

TEST(Metrics, RieszRepresentativeSolvesShiftedSystem) {
  const auto g = make_grid(2, 12);
  const auto v = GridFunction::from(g, [](Point p) { return p.x * p.x - p.y; });
  const auto w = h1_riesz(v);
  const auto A = assemble_neumann_stiffness(*g);
  const auto weights = mass_weights(*g);
  const auto Aw = A.apply(w);
  for (std::size_t n = 0; n < w.size(); ++n) EXPECT_NEAR(Aw[n] + weights[n] * w[n], weights[n] * v[n], 1e-12);
}

TEST(Metrics, EmpiricalNorm) {
  const std::vector<double> v{3.0, -4.0};
  EXPECT_NEAR(empirical_norm(v), std::sqrt(12.5), 1e-15);
}

TEST(Metrics, ErrorBundleSelectsRequestedErrors) {
  const auto g = make_grid(2, 8);
  const auto truth = GridFunction(g, 2.0);
  const auto rec = GridFunction(g, 2.2);
  const std::vector<double> a{1.0, 1.0}, b{1.1, 0.9};
  ErrorInputs in;
  in.f_rec = &rec;
  in.f_true = &truth;
  in.Sf_rec_at_points = b;
  in.Sf_true_at_points = a;
  const auto e = error_bundle(in);
  ASSERT_TRUE(e.err1 && e.err2 && e.err3);
  EXPECT_FALSE(e.err4.has_value());
  EXPECT_FALSE(e.err5.has_value());
  EXPECT_NEAR(*e.err1, 0.1, 1e-14);
  EXPECT_NEAR(*e.err3, 0.1, 1e-14);
  EXPECT_NEAR(*e.err2, 0.1, 1e-13);  // constants are eigenfunctions with mu = 0

  ErrorInputs q;
  q.q_rec = &rec;
  q.q_true = &truth;
  const auto eq = error_bundle(q);
  EXPECT_FALSE(eq.err1.has_value());
  EXPECT_NEAR(*eq.err5, 0.1, 1e-14);
  EXPECT_NEAR(*eq.err4, 0.1, 1e-13);

  const auto zero = GridFunction(g, 0.0);
  q.q_true = &zero;
  EXPECT_THROW(error_bundle(q), std::domain_error);
}
