#include "tpflow/mesh.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace tpflow {

namespace {

constexpr std::array<std::string_view, 7> kTagNames = {
    "DirichletAll", "Gamma1", "Gamma2", "Gamma3", "Gamma4", "Gamma5", "Gamma6"};

using Tagger = std::function<BoundaryTag(const Eigen::Vector2d& midpoint)>;

// Tensor grid on [x0, x0+nx*hx] x [y0, y0+ny*hy] keeping only cells with
// active(i, j). Nodes not touched by an active cell are dropped.
Mesh build_masked_grid(double hx, double hy, int nx, int ny,
                       const std::function<bool(int, int)>& active,
                       const std::function<double(const Eigen::Vector2d&)>& kappa,
                       const Tagger& tagger) {
  const auto lattice = [nx](int i, int j) { return static_cast<Index>(j) * (nx + 1) + i; };
  std::vector<Index> renumber(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
  Mesh mesh;
  std::vector<std::pair<int, int>> cell_ij;

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (active(i, j)) cell_ij.emplace_back(i, j);

  Index next = 0;
  // Number nodes lattice-wise so the ordering is independent of cell order.
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0 && !used; ++dj)
        for (int di = -1; di <= 0 && !used; ++di) {
          const int ci = i + di, cj = j + dj;
          used = ci >= 0 && cj >= 0 && ci < nx && cj < ny && active(ci, cj);
        }
      if (used) renumber[static_cast<std::size_t>(lattice(i, j))] = next++;
    }
  }
  mesh.nodes.resize(2, next);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Index id = renumber[static_cast<std::size_t>(lattice(i, j))];
      if (id >= 0) mesh.nodes.col(id) << i * hx, j * hy;
    }

  mesh.cell_permeability.resize(static_cast<Index>(cell_ij.size()));
  for (const auto& [i, j] : cell_ij) {
    const auto node = [&](int a, int b) { return renumber[static_cast<std::size_t>(lattice(a, b))]; };
    const Index c = mesh.num_cells();
    mesh.cells.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
    const Eigen::Vector2d center((i + 0.5) * hx, (j + 0.5) * hy);
    mesh.cell_permeability[c] = kappa(center);

    constexpr std::array<std::array<int, 2>, 4> neighbour = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
    for (int e = 0; e < 4; ++e) {
      const int ni = i + neighbour[static_cast<std::size_t>(e)][0];
      const int nj = j + neighbour[static_cast<std::size_t>(e)][1];
      const bool interior = ni >= 0 && nj >= 0 && ni < nx && nj < ny && active(ni, nj);
      if (interior) continue;
      const auto& cell = mesh.cells.back();
      const Index a = cell[static_cast<std::size_t>(e)];
      const Index b = cell[static_cast<std::size_t>((e + 1) % 4)];
      const Eigen::Vector2d mid = 0.5 * (mesh.nodes.col(a) + mesh.nodes.col(b));
      mesh.boundary_edges.push_back({{a, b}, tagger(mid), c, e});
    }
  }
  return mesh;
}

}  // namespace

std::string_view to_string(BoundaryTag tag) { return kTagNames[static_cast<std::size_t>(tag)]; }

BoundaryTag parse_boundary_tag(std::string_view name) {
  for (std::size_t k = 0; k < kTagNames.size(); ++k)
    if (kTagNames[k] == name) return static_cast<BoundaryTag>(k);
  throw std::invalid_argument("unknown boundary tag '" + std::string(name) + "'");
}

double Mesh::cell_area(Index cell) const {
  const auto& c = cells[static_cast<std::size_t>(cell)];
  // Shoelace formula; exact for planar quadrilaterals.
  double twice = 0.0;
  for (int k = 0; k < 4; ++k) {
    const auto p = nodes.col(c[static_cast<std::size_t>(k)]);
    const auto q = nodes.col(c[static_cast<std::size_t>((k + 1) % 4)]);
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

double Mesh::area() const {
  double total = 0.0;
  for (Index c = 0; c < num_cells(); ++c) total += cell_area(c);
  return total;
}

Mesh build_rect_mesh(double x_extent, double y_extent, int nx, int ny, double kappa) {
  if (!(x_extent > 0.0) || !(y_extent > 0.0))
    throw std::invalid_argument("build_rect_mesh: extents must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx, ny must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("build_rect_mesh: permeability must be positive");
  return build_masked_grid(
      x_extent / nx, y_extent / ny, nx, ny, [](int, int) { return true; },
      [kappa](const Eigen::Vector2d&) { return kappa; },
      [](const Eigen::Vector2d&) { return BoundaryTag::DirichletAll; });
}

Mesh build_q5spot_mesh(int n_per_side, CornerPolicy policy) {
  constexpr double kSide = 100.0;
  constexpr double kCorner = 5.0;
  constexpr double kKappa = 5e-8;
  constexpr double kKappaLow = 5e-11;
  if (n_per_side < 2) throw std::invalid_argument("build_q5spot_mesh: need at least 2 cells per side");

  const double h = kSide / n_per_side;
  const double cells_per_corner = kCorner / h;
  const int corner_cells = static_cast<int>(std::ceil(cells_per_corner - 1e-9));
  if (std::abs(cells_per_corner - std::round(cells_per_corner)) > 1e-9 &&
      policy == CornerPolicy::Reject)
    throw std::invalid_argument("build_q5spot_mesh: cell size " + std::to_string(h) +
                                " m does not divide the 5 m corner squares");
  if (2 * corner_cells >= n_per_side)
    throw std::invalid_argument("build_q5spot_mesh: mesh too coarse for the corner cuts");

  const int n = n_per_side;
  const auto active = [n, corner_cells](int i, int j) {
    const bool low = i < corner_cells && j < corner_cells;
    const bool high = i >= n - corner_cells && j >= n - corner_cells;
    return !low && !high;
  };
  const double cut = corner_cells * h;
  const double tol = 1e-9 * kSide;
  const auto tagger = [cut, tol](const Eigen::Vector2d& m) {
    if (std::abs(m.x()) < tol) return BoundaryTag::Gamma6;
    if (std::abs(m.y()) < tol) return BoundaryTag::Gamma2;
    if (std::abs(m.x() - kSide) < tol) return BoundaryTag::Gamma3;
    if (std::abs(m.y() - kSide) < tol) return BoundaryTag::Gamma5;
    if (m.x() <= cut + tol && m.y() <= cut + tol) return BoundaryTag::Gamma1;
    return BoundaryTag::Gamma4;
  };
  const auto kappa = [](const Eigen::Vector2d& c) {
    const bool inside = c.x() > 25.0 && c.x() < 50.0 && c.y() > 25.0 && c.y() < 50.0;
    return inside ? kKappaLow : kKappa;
  };
  Mesh mesh = build_masked_grid(h, h, n, n, active, kappa, tagger);
  mesh.corner_cut = cut;
  return mesh;
}

std::vector<BoundaryEdge> boundary_edges_with_tag(const Mesh& mesh, BoundaryTag tag) {
  std::vector<BoundaryEdge> out;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == tag) out.push_back(e);
  if (out.empty())
    throw std::invalid_argument("boundary tag " + std::string(to_string(tag)) +
                                " does not occur on this mesh");
  return out;
}

void validate_mesh(const Mesh& mesh) {
  const auto fail = [](const std::string& what) { throw std::logic_error("invalid mesh: " + what); };
  if (mesh.cell_permeability.size() != mesh.num_cells()) fail("permeability size mismatch");
  std::map<std::pair<Index, Index>, int> edge_count;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(c)];
    if (!(mesh.cell_permeability[c] > 0.0)) fail("non-positive permeability");
    for (int k = 0; k < 4; ++k) {
      // Jacobian determinant of the bilinear map at corner k equals the cross
      // product of the two edges leaving that corner.
      const Eigen::Vector2d p = mesh.nodes.col(cell[static_cast<std::size_t>(k)]);
      const Eigen::Vector2d next = mesh.nodes.col(cell[static_cast<std::size_t>((k + 1) % 4)]);
      const Eigen::Vector2d prev = mesh.nodes.col(cell[static_cast<std::size_t>((k + 3) % 4)]);
      const Eigen::Vector2d a = next - p, b = prev - p;
      if (!(a.x() * b.y() - a.y() * b.x() > 0.0)) fail("non-positive Jacobian");
      const Index u = cell[static_cast<std::size_t>(k)];
      const Index v = cell[static_cast<std::size_t>((k + 1) % 4)];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
    }
  }
  std::map<std::pair<Index, Index>, int> tagged;
  for (const auto& e : mesh.boundary_edges) {
    const auto key = std::make_pair(std::min(e.nodes[0], e.nodes[1]), std::max(e.nodes[0], e.nodes[1]));
    if (++tagged[key] != 1) fail("boundary edge tagged twice");
  }
  for (const auto& [key, count] : edge_count) {
    if (count > 2) fail("edge shared by more than two cells");
    if ((count == 1) != (tagged.count(key) == 1)) fail("boundary edge set inconsistent");
  }
}

}  // namespace tpflow
