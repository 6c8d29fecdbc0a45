#ifndef TPFLOW_VTK_HPP
#define TPFLOW_VTK_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tpflow/spatial.hpp"

namespace tpflow {

/// Legacy ASCII unstructured grid of the mesh with per-cell permeability.
void write_mesh_vtk(std::ostream& out, const Mesh& mesh);

/// Legacy ASCII unstructured grid over the dofs of `space` (bilinear or
/// biquadratic cells) with one point-data array per named field.
void write_fields_vtk(std::ostream& out, const FeSpace& space,
                      const std::vector<std::pair<std::string, const Field*>>& fields);

}  // namespace tpflow

#endif  // TPFLOW_VTK_HPP
