#pragma once

#include <array>
#include <memory>
#include <vector>

#include "gregsolid/bspline.hpp"
#include "gregsolid/domain.hpp"

namespace gregsolid {

enum class PatchKind { tensor_spline, sampled_grid };

/// Raw per-face surface description as it appears in a model file.  Exactly one
/// descriptor per domain face, in face-index order.
struct PatchDescriptor {
    PatchKind kind = PatchKind::sampled_grid;

    // tensor_spline: a patch over [0,1]^2 whose parameter square is pinned to a
    // quadrilateral face by the corner correspondence (0,0)->face_corners[0],
    // (1,0)->face_corners[1], (1,1)->face_corners[2], (0,1)->face_corners[3].
    BSplinePatch spline;
    std::array<int, 4> face_corners{-1, -1, -1, -1};

    // sampled_grid: values on a structured grid of face-chart parameter pairs;
    // points[iu][iv] belongs to chart coordinates (params_u[iu], params_v[iv]).
    std::vector<double> params_u;
    std::vector<double> params_v;
    std::vector<std::vector<Vec3>> points;
};

/// Evaluable boundary surface over one face polygon of the domain.
struct BoundaryPatch {
    int face = -1;
    PatchKind kind = PatchKind::sampled_grid;

    // tensor_spline evaluation data
    BSplinePatch spline;
    std::array<Vec2, 4> quad_chart{};  ///< chart coordinates of the pinned corners

    // sampled_grid evaluation data
    std::vector<double> params_u;
    std::vector<double> params_v;
    std::vector<std::vector<Vec3>> points;

    FaceChart chart;

    /// Surface position for a point q of the face polygon.
    Vec3 surface(const Vec3& q) const;

    /// Surface position for face-chart coordinates (s, t).
    Vec3 surface_at_chart(const Vec2& st) const;
};

/// One boundary patch reparameterized by the two face-restricted coordinates
/// of a corner: S(a,b) = surface(invert_face_coordinates(l, role, a, b)).
struct CornerPatchView {
    std::shared_ptr<const PolyhedralDomain> domain;
    std::shared_ptr<const std::vector<BoundaryPatch>> patches;
    int corner = -1;
    FaceRole role = FaceRole::top;
    int face = -1;

    Vec3 eval(double a, double b) const;
};

/// Finite-difference cross-tangent samples along one boundary curve of a view.
struct TangentSamples {
    std::vector<double> t;  ///< uniform parameters in [0, 1]
    std::vector<Vec3> v;    ///< difference quotients at each t
};

/// The six per-corner cross-tangent sample sets.
struct CornerTangentSamples {
    TangentSamples p_lft, p_rgt, q_lft, q_rgt, r_lft, r_rgt;
};

/// The six per-corner fitted tangent fields (cubic curves).  After fitting,
/// the three corner-coincident endpoint pairs store identical control points:
/// r_rgt(0) = q_lft(0), p_rgt(0) = r_lft(0), q_rgt(0) = p_lft(0).
struct TangentFieldSet {
    BSplineCurve p_lft, p_rgt, q_lft, q_rgt, r_lft, r_rgt;
};

/// Bi-cubic tangent-vector patch with its optimization mask.  Control points
/// with free_mask[i][j] = false (those with i = 0 or j = 0, realizing the two
/// fitted boundary curves) stay fixed; the rest are optimization variables.
struct TangentPatch {
    BSplinePatch patch;  ///< 4x4 single-segment bi-cubic
    std::array<std::array<bool, 4>, 4> free_mask{};  ///< [i][j], i = first param

    Vec3 eval(double a, double b, int da = 0, int db = 0) const {
        return eval_patch(patch, a, b, da, db);
    }
};

/// Validates descriptors against the domain and builds evaluable patches.
/// Checks one descriptor per face, well-formed data, and watertightness along
/// every shared edge (64 samples, tolerance 1e-7 x bounding-box diagonal).
/// Throws IngestionError naming the offending face or edge.
std::vector<BoundaryPatch> ingest_patches(const PolyhedralDomain& d,
                                          const std::vector<PatchDescriptor>& raw);

/// The three views of corner l in role order top, lft, rgt.
std::array<CornerPatchView, 3> make_corner_views(
    std::shared_ptr<const PolyhedralDomain> d,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches, int l);

/// One-sided difference quotients (S(..h..) - S(..0..)) / h at `samples`
/// uniform parameters along one boundary curve of the view.  `along_axis`
/// selects the parameter that runs along the curve (0 = first, 1 = second);
/// the difference is taken in the other parameter.
TangentSamples estimate_cross_tangents(const CornerPatchView& view, int along_axis,
                                       int samples, double h = 1e-3);

/// All six fields of one corner from its three views.
CornerTangentSamples estimate_corner_tangents(const std::array<CornerPatchView, 3>& views,
                                              int samples = 20, double h = 1e-3);

/// Cubic least-squares fit of each sampled field, then endpoint averaging so
/// the three corner-coincident pairs agree exactly (bit-equal storage).
TangentFieldSet fit_tangent_fields(const CornerTangentSamples& samples);

/// Initial tangent patches [top, lft, rgt] from the fitted fields: the two
/// fitted boundary curves, a far corner placed by extrapolating their average
/// endpoint away from the corner value, two straight boundary segments to it,
/// and a Coons fill — all expressed as a single-segment bi-cubic net with the
/// free mask set on everything outside the two fitted boundary rows.
std::array<TangentPatch, 3> build_initial_tangent_patches(const TangentFieldSet& fields);

}  // namespace gregsolid
