#pragma once

#include <string>
#include <vector>

#include "gregsolid/grid.hpp"
#include "gregsolid/quality.hpp"

namespace gregsolid {

/// Per-vertex quality scalar: the minimum scaled Jacobian over every
/// (cell, corner) incidence of each vertex, i.e. the worst corner quality a
/// vertex participates in.  Throws ArgumentError when jv does not hold
/// exactly 8 values per cell of the mesh.
std::vector<double> vertex_min_jacobians(const HexGrid& mesh, const JacobianVector& jv);

/// Write the mesh as a legacy ASCII VTK unstructured grid: float64 POINTS,
/// type-12 hexahedron CELLS in the corner order the grid stores, and a
/// POINT_DATA scalar field `scaled_jacobian` holding vertex_min_jacobians.
/// Throws ArgumentError on inconsistent sizes, IoError when the path cannot
/// be written.
void export_vtk(const HexGrid& mesh, const JacobianVector& jv, const std::string& path);

}  // namespace gregsolid
