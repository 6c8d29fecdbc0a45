#ifndef TPFLOW_MESH_HPP
#define TPFLOW_MESH_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace tpflow {

using Index = Eigen::Index;

/// Label attached to every boundary edge. DirichletAll is the default for
/// rectangles; Gamma1..Gamma6 partition the quarter-five-spot boundary.
enum class BoundaryTag { DirichletAll, Gamma1, Gamma2, Gamma3, Gamma4, Gamma5, Gamma6 };

std::string_view to_string(BoundaryTag tag);
/// Throws std::invalid_argument for names that are not a tag.
BoundaryTag parse_boundary_tag(std::string_view name);

struct BoundaryEdge {
  std::array<Index, 2> nodes;  // oriented as in the owning cell (CCW)
  BoundaryTag tag;
  Index cell;
  int local_edge;  // 0 bottom, 1 right, 2 top, 3 left in reference coordinates
};

/// Quadrilateral mesh with counter-clockwise cells and piecewise constant
/// permeability. Immutable once built.
struct Mesh {
  Eigen::Matrix2Xd nodes;
  std::vector<std::array<Index, 4>> cells;
  std::vector<BoundaryEdge> boundary_edges;
  Eigen::VectorXd cell_permeability;
  /// Side length of the removed corner squares (0 for plain rectangles).
  double corner_cut = 0.0;

  Index num_nodes() const { return nodes.cols(); }
  Index num_cells() const { return static_cast<Index>(cells.size()); }
  double cell_area(Index cell) const;
  double area() const;
};

Mesh build_rect_mesh(double x_extent, double y_extent, int nx, int ny, double kappa);

enum class CornerPolicy {
  Reject,       // cell size must divide the 5 m corner squares
  SnapOutward,  // remove every cell touching a corner square
};

/// [0,100]^2 minus [0,5]^2 and [95,100]^2 on an n x n grid, tagged Gamma1..Gamma6,
/// with the low-permeability block [25,50]^2.
Mesh build_q5spot_mesh(int n_per_side, CornerPolicy policy = CornerPolicy::Reject);

/// Throws std::invalid_argument if no edge carries the tag.
std::vector<BoundaryEdge> boundary_edges_with_tag(const Mesh& mesh, BoundaryTag tag);

/// Checks the structural invariants (positive Jacobians, edge ownership,
/// positive permeability). Throws std::logic_error on the first violation.
void validate_mesh(const Mesh& mesh);

}  // namespace tpflow

#endif  // TPFLOW_MESH_HPP
