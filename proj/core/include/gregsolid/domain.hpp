#pragma once

#include <array>
#include <string>
#include <vector>

#include "gregsolid/types.hpp"

namespace gregsolid {

/// Role of a face relative to one of its corners.  Viewed from corner l with
/// axis neighbors (j: u, k: v, i: w): top carries the edges to j and k (w = 0
/// on it), lft carries j and i (v = 0), rgt carries k and i (u = 0).
enum class FaceRole { top = 0, lft = 1, rgt = 2 };

/// Per-corner axis frame: neighbor corners by parameter direction plus the
/// three incident faces by role.  Frames are right-handed:
/// det[c_j - c_l, c_k - c_l, c_i - c_l] > 0.
struct CornerFrame {
    int j = -1;  ///< u-direction neighbor
    int k = -1;  ///< v-direction neighbor
    int i = -1;  ///< w-direction neighbor
    int top = -1;
    int lft = -1;
    int rgt = -1;
};

/// Parameter values of a point with respect to one corner.
struct CornerCoordinates {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

/// Affine chart of a planar face: orthonormal in-plane axes scaled so the
/// polygon's bounding rectangle maps onto [0,1]^2.
struct FaceChart {
    Vec3 origin = Vec3::Zero();
    Vec3 e1 = Vec3::UnitX();  ///< in-plane unit axis
    Vec3 e2 = Vec3::UnitY();  ///< in-plane unit axis, normal x e1
    double width = 1.0;
    double height = 1.0;
    std::vector<Vec2> polygon;  ///< face corners in chart coordinates

    Vec2 to_chart(const Vec3& q) const;
    Vec3 to_space(const Vec2& st) const;
};

/// Cached inverse of the coordinate map restricted to one face, seen from one
/// corner: recovers the face point whose two free coordinates are (a, b).
struct FaceCoordInverter {
    int corner = -1;
    FaceRole role = FaceRole::top;
    int face = -1;
    FaceChart chart;
    Vec3 corner_pos = Vec3::Zero();
    Vec3 plane_n1 = Vec3::Zero();  ///< inward normal of the first coordinate plane
    Vec3 plane_n2 = Vec3::Zero();  ///< inward normal of the second coordinate plane
    Vec3 opp1 = Vec3::Zero();      ///< distance corner of the first coordinate
    Vec3 opp2 = Vec3::Zero();      ///< distance corner of the second coordinate
    Vec3 corner_a1 = Vec3::Zero();  ///< face point at (1, 0)
    Vec3 corner_b1 = Vec3::Zero();  ///< face point at (0, 1)
    int seed_res = 33;
    std::vector<Vec2> seeds;  ///< seed_res x seed_res chart points by (a, b) bucket
};

/// Straight-edged convex polyhedron serving as the parametric domain.
/// Immutable after construction; all queries are pure and parallel-safe.
struct PolyhedralDomain {
    std::string shape;
    std::vector<Vec3> corners;
    std::vector<std::array<int, 2>> edges;   ///< sorted corner-index pairs
    std::vector<std::vector<int>> faces;     ///< corner cycles, CCW from outside
    std::vector<CornerFrame> frames;
    std::vector<Vec3> face_normals;          ///< unit outward normals
    std::vector<double> face_offsets;        ///< n . x = offset on the face plane
    std::vector<FaceCoordInverter> inverters;  ///< 3 per corner, index 3l + role

    int face_of_role(int l, FaceRole role) const;
    bool face_contains(int f, int c) const;
    int edge_index(int a, int b) const;      ///< -1 when the corners share no edge
    const std::array<int, 2>& adjacent_faces_of_edge(int e) const;
    bool contains(const Vec3& p, double tol = 1e-9) const;
    Vec3 face_barycenter(int f) const;
    Vec3 body_barycenter() const;
    double volume() const;
    double bbox_diagonal() const;

    /// Cached edge -> adjacent face pairs, built at construction.
    std::vector<std::array<int, 2>> edge_faces;
};

/// Catalog construction: tetrahedron, triangular_prism, hexahedron,
/// pentagonal_prism.  Unit edge lengths, centroid at the origin.
PolyhedralDomain build_domain(const std::string& shape);

/// Chart of face f (deterministic for a given domain).
FaceChart face_chart(const PolyhedralDomain& d, int f);

/// Parameter values of p with respect to corner l.  Throws DomainError when p
/// lies outside the domain beyond tolerance.
CornerCoordinates corner_coordinates(const PolyhedralDomain& d, int l, const Vec3& p);

/// Blending weight of corner l at p; the weights over all corners sum to 1.
double corner_weight(const PolyhedralDomain& d, int l, const Vec3& p);

/// All corner weights at p in one pass.
std::vector<double> corner_weights(const PolyhedralDomain& d, const Vec3& p);

/// Point q on the face of the given role whose face-restricted coordinates
/// equal (a, b); when (a, b) lies outside the image of the face, the face
/// point with nearest coordinates.  Throws NumericError on non-convergence.
Vec3 invert_face_coordinates(const PolyhedralDomain& d, int l, FaceRole role,
                             double a, double b);

}  // namespace gregsolid
