#include <cmath>

#include <gtest/gtest.h>

#include "hardyheat/errors.hpp"
#include "hardyheat/grid.hpp"

using namespace hardyheat;

TEST(Grid, HalfSpacingInterval) {
  const auto g = build_grid(Domain::interval(-1, 1), 0.5);
  ASSERT_EQ(g.size(), 4u);
  const double expect[] = {-0.75, -0.25, 0.25, 0.75};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(g.coordinate(i, 0), expect[i]);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.5);
}

TEST(Grid, OddCellCountRejected) {
  EXPECT_THROW(build_grid(Domain::interval(-1, 1), 2.0 / 3.0), ConfigError);
}

TEST(Grid, BadInputsRejected) {
  EXPECT_THROW(build_grid(Domain::interval(-1, 1), 0.0), ConfigError);
  EXPECT_THROW(build_grid(Domain::interval(-1, 1), -0.1), ConfigError);
  EXPECT_THROW(build_grid(Domain::interval(0.5, 1), 0.1), ConfigError);
  EXPECT_THROW(build_grid(Domain::interval(-1, 1), 0.3), ConfigError);
}

TEST(Grid, SquareCount) {
  const auto g = build_grid(Domain::box({-1, 1}, {-1, 1}), 0.5);
  EXPECT_EQ(g.size(), 16u);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
}

TEST(Grid, NoNodeAtOriginAndMinimalRadius) {
  for (double h : {0.1, 0.02, 0.0025}) {
    const auto g = build_grid(Domain::interval(-1, 1), h);
    EXPECT_NEAR(g.radius(g.nearest_to_origin()), h / 2, 1e-14);
  }
  const auto g = build_grid(Domain::interval(-0.5, 1.5), 0.25);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(g.radius(i), 0.125 - 1e-15);
}

TEST(Grid, LatticeIndicesAndFlatIndex) {
  const auto g = build_grid(Domain::box({-1, 1}, {-0.5, 1.5}), 0.25);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(g.coordinate(i, k), (g.lattice_index(i, k) + 0.5) * 0.25, 1e-14);
    }
    const int cell[2] = {g.cell_index(i, 0), g.cell_index(i, 1)};
    EXPECT_EQ(g.flat_index(cell), i);
  }
}

TEST(Grid, CentralBoxAndBoundaryDistance) {
  const auto dom = Domain::interval(-1, 1);
  const auto g = build_grid(dom, 0.25);
  const auto inner = g.nodes_in(dom.central_box(0.5));
  EXPECT_EQ(inner.size(), 4u);
  EXPECT_DOUBLE_EQ(g.boundary_distance(0), 0.125);
}
