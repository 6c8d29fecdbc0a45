#include "tpflow/vtk.hpp"

#include <array>
#include <ostream>
#include <stdexcept>

namespace tpflow {

namespace {

void header(std::ostream& out) {
  out << "# vtk DataFile Version 3.0\ntpflow\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out.precision(12);
}

}  // namespace

void write_mesh_vtk(std::ostream& out, const Mesh& mesh) {
  header(out);
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (Index i = 0; i < mesh.num_nodes(); ++i) out << mesh.nodes(0, i) << ' ' << mesh.nodes(1, i) << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 5 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells) out << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) out << "9\n";
  out << "CELL_DATA " << mesh.num_cells() << "\nSCALARS permeability double 1\nLOOKUP_TABLE default\n";
  for (Index c = 0; c < mesh.num_cells(); ++c) out << mesh.cell_permeability[c] << '\n';
}

void write_fields_vtk(std::ostream& out, const FeSpace& space,
                      const std::vector<std::pair<std::string, const Field*>>& fields) {
  for (const auto& [name, f] : fields)
    if (!f || f->size() != space.num_dofs()) throw std::invalid_argument("write_fields_vtk: bad field " + name);
  // VTK node order: corners, edge midpoints (bottom, right, top, left), center.
  static const std::array<int, 4> q1 = {0, 1, 3, 2};
  static const std::array<int, 9> q2 = {0, 2, 8, 6, 1, 5, 7, 3, 4};
  const bool quad = space.degree() == 2;
  const int nloc = quad ? 9 : 4;

  header(out);
  out << "POINTS " << space.num_dofs() << " double\n";
  for (Index i = 0; i < space.num_dofs(); ++i)
    out << space.dof_coordinates()(0, i) << ' ' << space.dof_coordinates()(1, i) << " 0\n";
  out << "CELLS " << space.num_cells() << ' ' << (nloc + 1) * space.num_cells() << '\n';
  for (Index c = 0; c < space.num_cells(); ++c) {
    const auto dofs = space.cell_dofs(c);
    out << nloc;
    for (int k = 0; k < nloc; ++k)
      out << ' ' << dofs[static_cast<std::size_t>(quad ? q2[static_cast<std::size_t>(k)] : q1[static_cast<std::size_t>(k)])];
    out << '\n';
  }
  out << "CELL_TYPES " << space.num_cells() << '\n';
  for (Index c = 0; c < space.num_cells(); ++c) out << (quad ? 28 : 9) << '\n';
  out << "POINT_DATA " << space.num_dofs() << '\n';
  for (const auto& [name, f] : fields) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (Index i = 0; i < f->size(); ++i) out << (*f)[i] << '\n';
  }
}

}  // namespace tpflow
