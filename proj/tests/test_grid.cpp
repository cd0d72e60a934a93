#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fluoinv/grid.hpp"
#include "fluoinv/sparse.hpp"

using namespace fluoinv;

TEST(Grid, IndexingAndCoordinates) {
  const auto g = make_grid(2, 4);
  EXPECT_EQ(g->node_count(), 25u);
  EXPECT_EQ(g->index(2, 3), 17u);
  EXPECT_EQ(g->ix(17), 2);
  EXPECT_EQ(g->iy(17), 3);
  EXPECT_DOUBLE_EQ(g->coordinate(17).x, 0.5);
  EXPECT_DOUBLE_EQ(g->coordinate(17).y, 0.75);
  EXPECT_EQ(g->boundary_nodes().size(), 16u);
  EXPECT_EQ(g->interior_nodes().size(), 9u);
  EXPECT_TRUE(g->is_boundary(g->index(0, 2)));
  EXPECT_FALSE(g->is_boundary(g->index(1, 2)));
}

TEST(Grid, OneDimensional) {
  const auto g = make_grid(1, 8);
  EXPECT_EQ(g->node_count(), 9u);
  EXPECT_EQ(g->boundary_nodes().size(), 2u);
  EXPECT_DOUBLE_EQ(g->outward_normal(0).x, -1.0);
  EXPECT_DOUBLE_EQ(g->outward_normal(8).x, 1.0);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(make_grid(3, 4), std::invalid_argument);
  EXPECT_THROW(make_grid(2, 0), std::invalid_argument);
}

TEST(Grid, MassWeightsIntegrateExactlyLinearFunctions) {
  for (int dim : {1, 2}) {
    const auto g = make_grid(dim, 10);
    const auto w = mass_weights(*g);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-14);
    double ix = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) ix += w[n] * g->coordinate(n).x;
    EXPECT_NEAR(ix, 0.5, 1e-14);
  }
}

TEST(GridFunction, ArithmeticAndGridChecks) {
  const auto g = make_grid(2, 4);
  const auto a = GridFunction::from(g, [](Point p) { return p.x + 2.0 * p.y; });
  const GridFunction b(g, 1.5);
  const auto c = 2.0 * a - b;
  for (std::size_t n = 0; n < c.size(); ++n) EXPECT_DOUBLE_EQ(c[n], 2.0 * a[n] - 1.5);
  EXPECT_DOUBLE_EQ(a.min(), 0.0);
  EXPECT_DOUBLE_EQ(a.max(), 3.0);
  EXPECT_THROW(make_grid(2, 3), std::invalid_argument);
  const auto prod = pointwise_multiply(a, b);
  EXPECT_DOUBLE_EQ(prod[5], 1.5 * a[5]);
  const auto other = GridFunction(make_grid(2, 5), 1.0);
  EXPECT_THROW(a + other, std::invalid_argument);
  EXPECT_THROW(pointwise_divide(a, GridFunction(g, 0.0)), std::domain_error);
}
