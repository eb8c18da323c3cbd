#pragma once

#include <array>
#include <vector>

#include "gregsolid/domain.hpp"
#include "gregsolid/types.hpp"

namespace gregsolid {

/// Corner positions of the reference cell, in cell vertex order.
extern const std::array<Vec3, 8> hex_corner_offsets;

/// For each cell corner, its three edge-adjacent corners in axis order.
extern const std::array<std::array<int, 3>, 8> hex_corner_neighbors;

/// The twelve corner-index pairs forming the cell edges.
extern const std::array<std::array<int, 2>, 12> hex_edge_list;

/// Decomposition of the reference cell into six tetrahedra around the 0-6
/// diagonal.  Every internal face of the decomposition is split consistently
/// with the neighboring cell, so the tetrahedra tile block-structured grids.
extern const std::array<std::array<int, 4>, 6> hex_tet_split;

/// Signed volume of a (possibly non-planar-faced) cell via the
/// six-tetrahedron decomposition.
double hex_volume(const std::array<Vec3, 8>& cell);

/// Whether p lies in the cell (union of the six tetrahedra).  Positive tol
/// expands each tetrahedron; negative tol shrinks it.
bool hex_contains(const std::array<Vec3, 8>& cell, const Vec3& p, double tol = 1e-9);

/// One corner block of the structured grid: a (nu+1) x (nv+1) x (nw+1)
/// lattice of global vertex ids.
struct BlockLattice {
    int corner = -1;
    int nu = 0;
    int nv = 0;
    int nw = 0;
    std::vector<int> vertex_ids;

    int at(int a, int b, int c) const {
        return vertex_ids[static_cast<std::size_t>((a * (nv + 1) + b) * (nw + 1) + c)];
    }
};

/// Conforming all-hex grid over a polyhedral domain (or its image).
struct HexGrid {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 8>> cells;
    std::vector<std::vector<int>> neighbors;  ///< sorted edge-adjacent vertex ids
    std::vector<bool> on_boundary;
    std::array<int, 3> resolution{0, 0, 0};
    std::vector<BlockLattice> blocks;
};

/// One corner block per domain corner, M x N x L cells each, with shared
/// vertices on block interfaces identified structurally (single ids, no
/// positional merging).  Resolutions that conflict with the domain's face
/// structure are rejected.
HexGrid generate_parametric_grid(const PolyhedralDomain& d, int M, int N, int L);

/// The corner blocks of the domain itself as eight-corner cells in cell
/// vertex order: corner, three edge midpoints, three face barycenters, body
/// barycenter.
std::vector<std::array<Vec3, 8>> dual_split(const PolyhedralDomain& d);

}  // namespace gregsolid
