#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "tpflow/mesh.hpp"

using namespace tpflow;

TEST(Mesh, RectCounts) {
  const Mesh m = build_rect_mesh(1, 1, 2, 2, 1);
  EXPECT_EQ(m.num_cells(), 4);
  EXPECT_EQ(m.num_nodes(), 9);

  const Mesh one = build_rect_mesh(1, 1, 1, 1, 1);
  EXPECT_EQ(one.num_cells(), 1);
  EXPECT_EQ(one.num_nodes(), 4);
  EXPECT_EQ(one.boundary_edges.size(), 4u);

  const Mesh big = build_rect_mesh(1, 1, 64, 64, 1);
  EXPECT_EQ(big.num_cells(), 4096);
  EXPECT_EQ(big.num_nodes(), 65 * 65);
  EXPECT_NO_THROW(validate_mesh(big));
}

TEST(Mesh, RectRejectsBadInput) {
  EXPECT_THROW(build_rect_mesh(0, 1, 2, 2, 1), std::invalid_argument);
  EXPECT_THROW(build_rect_mesh(1, -1, 2, 2, 1), std::invalid_argument);
  EXPECT_THROW(build_rect_mesh(1, 1, 0, 2, 1), std::invalid_argument);
  EXPECT_THROW(build_rect_mesh(1, 1, 2, 2, 0), std::invalid_argument);
}

TEST(Mesh, AllEdgesTaggedDirichletByDefault) {
  const Mesh m = build_rect_mesh(1, 1, 5, 5, 1);
  EXPECT_EQ(boundary_edges_with_tag(m, BoundaryTag::DirichletAll).size(), 20u);
}

TEST(Mesh, RefinementQuartersAreas) {
  const Mesh a = build_rect_mesh(2, 3, 3, 4, 1);
  const Mesh b = build_rect_mesh(2, 3, 6, 8, 1);
  EXPECT_NEAR(b.cell_area(0), a.cell_area(0) / 4, 1e-15);
  EXPECT_NEAR(a.area(), 6.0, 1e-12);
  EXPECT_NEAR(b.area(), 6.0, 1e-12);
}

TEST(Mesh, Q5SpotTwentyCells) {
  const Mesh m = build_q5spot_mesh(20);
  EXPECT_EQ(m.num_cells(), 398);
  EXPECT_NEAR(m.area(), 1e4 - 50.0, 1e-12 * 1e4);
  EXPECT_NO_THROW(validate_mesh(m));

  // Gamma1: the two edges of the cut corner at the origin.
  const auto g1 = boundary_edges_with_tag(m, BoundaryTag::Gamma1);
  ASSERT_EQ(g1.size(), 2u);
  for (const auto& e : g1)
    for (Index n : e.nodes) EXPECT_LE(m.nodes.col(n).maxCoeff(), 5.0 + 1e-12);

  // Gamma6: x = 0, y in [5, 100].
  const auto g6 = boundary_edges_with_tag(m, BoundaryTag::Gamma6);
  EXPECT_EQ(g6.size(), 19u);
  for (const auto& e : g6)
    for (Index n : e.nodes) {
      EXPECT_EQ(m.nodes(0, n), 0.0);
      EXPECT_GE(m.nodes(1, n), 5.0);
    }
}

TEST(Mesh, Q5SpotTagsPartitionBoundary) {
  const Mesh m = build_q5spot_mesh(40);
  std::size_t total = 0;
  for (BoundaryTag t : {BoundaryTag::Gamma1, BoundaryTag::Gamma2, BoundaryTag::Gamma3, BoundaryTag::Gamma4,
                        BoundaryTag::Gamma5, BoundaryTag::Gamma6})
    total += boundary_edges_with_tag(m, t).size();
  EXPECT_EQ(total, m.boundary_edges.size());
  EXPECT_THROW(boundary_edges_with_tag(m, BoundaryTag::DirichletAll), std::invalid_argument);
}

TEST(Mesh, Q5SpotPermeabilityBlock) {
  const Mesh m = build_q5spot_mesh(20);
  int low = 0;
  for (Index c = 0; c < m.num_cells(); ++c) {
    if (m.cell_permeability[c] == 5e-11) ++low;
    else EXPECT_EQ(m.cell_permeability[c], 5e-8);
  }
  EXPECT_EQ(low, 25);  // 25 m block on a 5 m grid
}

TEST(Mesh, Q5SpotMisalignedCorners) {
  EXPECT_THROW(build_q5spot_mesh(38), std::invalid_argument);
  const Mesh m = build_q5spot_mesh(38, CornerPolicy::SnapOutward);
  EXPECT_NO_THROW(validate_mesh(m));
  EXPECT_GE(m.corner_cut, 5.0);
  EXPECT_EQ(m.num_cells(), 38 * 38 - 2 * 4);  // 2 x 2 cells per corner
  // Every remaining cell lies inside the domain with the 5 m corners removed.
  for (const auto& c : m.cells) {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    for (Index n : c) center += m.nodes.col(n) / 4.0;
    EXPECT_FALSE(center.x() < 5 && center.y() < 5);
    EXPECT_FALSE(center.x() > 95 && center.y() > 95);
  }
}

TEST(Mesh, InteriorEdgesSharedTwice) {
  const Mesh m = build_q5spot_mesh(20);
  std::map<std::pair<Index, Index>, int> count;
  for (const auto& c : m.cells)
    for (int e = 0; e < 4; ++e) {
      const Index a = c[static_cast<std::size_t>(e)], b = c[static_cast<std::size_t>((e + 1) % 4)];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  std::size_t boundary = 0;
  for (const auto& [edge, n] : count) {
    EXPECT_LE(n, 2);
    if (n == 1) ++boundary;
  }
  EXPECT_EQ(boundary, m.boundary_edges.size());
}

TEST(Mesh, TagNames) {
  for (BoundaryTag t : {BoundaryTag::DirichletAll, BoundaryTag::Gamma1, BoundaryTag::Gamma6})
    EXPECT_EQ(parse_boundary_tag(to_string(t)), t);
  EXPECT_THROW(parse_boundary_tag("Gamma7"), std::invalid_argument);
}
