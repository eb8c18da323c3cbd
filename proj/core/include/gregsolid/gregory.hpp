#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "gregsolid/boundary.hpp"
#include "gregsolid/domain.hpp"
#include "gregsolid/grid.hpp"
#include "gregsolid/types.hpp"

namespace gregsolid {

/// Per-corner interpolation data: the three incident face views in role order
/// [top, lft, rgt] and the three transversal tangent-vector patches in the
/// same order (patches[0] prescribes the derivative across the top face, and
/// so on).
struct GregoryCornerInterpolator {
    int corner = -1;
    std::array<CornerPatchView, 3> views;
    std::array<TangentPatch, 3> patches;
};

/// Identity of one free tangent-patch control point in the flat variable
/// vector: tangent patch `role` of corner `corner`, control indices (i, j).
struct FreeControlRef {
    int corner = -1;
    int role = 0;
    int i = 0;
    int j = 0;
};

/// The volumetric map over a polyhedral domain: one corner interpolator per
/// domain corner, blended by the corner weights, plus the flat view over the
/// free tangent-patch control points.  Copying a solid snapshots it; the
/// heavyweight domain and patch data are shared immutably.
struct GregorySolid {
    std::shared_ptr<const PolyhedralDomain> domain;
    std::shared_ptr<const std::vector<BoundaryPatch>> patches;
    std::vector<GregoryCornerInterpolator> interpolators;
    std::vector<FreeControlRef> variable_map;
};

/// Builds one corner's interpolator: face views, finite-difference tangent
/// estimation, field fitting, and the initial tangent patches.
GregoryCornerInterpolator make_corner_interpolator(
    std::shared_ptr<const PolyhedralDomain> domain,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches, int l,
    int tangent_samples = 20, double fd_step = 1e-3);

/// Builds the full solid over ingested boundary patches.
GregorySolid build_gregory_solid(
    std::shared_ptr<const PolyhedralDomain> domain,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches,
    int tangent_samples = 20, double fd_step = 1e-3);

/// Corner interpolator value at local coordinates (u, v, w) in [0,1]^3.
/// Restricting any coordinate to 0 reproduces the corresponding face view,
/// independently of the tangent-patch interiors; the transversal derivative
/// at each face equals the corresponding tangent patch.  Throws DomainError
/// for parameters outside the unit cube.
Vec3 eval_corner_interpolator(const GregoryCornerInterpolator& g,
                              double u, double v, double w);

/// Solid value at a parametric point p inside or on the domain: the
/// corner-weight blend of the corner interpolators at p's local coordinates.
Vec3 eval_solid(const GregorySolid& s, const Vec3& p);

/// Maps a parametric grid into the physical domain.  Connectivity, block
/// structure, and boundary flags are copied unchanged; vertex positions are
/// evaluated through the solid.  Boundary vertices depend only on the
/// boundary patches, never on the free tangent controls.
HexGrid map_grid(const GregorySolid& s, const HexGrid& grid);

/// Free control points flattened to scalars: entry 3m + c is coordinate c of
/// the control point identified by variable_map[m].
std::vector<double> pack_variables(const GregorySolid& s);

/// Writes a flat vector back into the free control points.  Throws
/// ArgumentError when the length differs from 3 * variable_map size.
void unpack_variables(GregorySolid& s, const std::vector<double>& x);

/// Affine decomposition of the grid map in the free controls: vertex n sits
/// at base[n] + sum over (m, f) in coeffs[n] of f * (x[3m], x[3m+1], x[3m+2]).
/// Vertices whose position is independent of the variables (all grid boundary
/// vertices) carry no coefficients at all.
struct GridMapCache {
    int n_variables = 0;  ///< variable point count; x length must be 3x this
    std::vector<Vec3> base;
    std::vector<std::vector<std::pair<int, double>>> coeffs;
};

/// Builds the decomposition for every vertex of a parametric grid.
GridMapCache build_grid_map_cache(const GregorySolid& s, const HexGrid& grid);

/// Vertex positions for the flat variable vector x, using the decomposition.
/// Throws ArgumentError on a length mismatch against the cached coefficients.
std::vector<Vec3> apply_grid_map_cache(const GridMapCache& cache,
                                       const std::vector<double>& x);

}  // namespace gregsolid
