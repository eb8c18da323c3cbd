#pragma once

#include <array>
#include <utility>
#include <vector>

#include "gregsolid/grid.hpp"
#include "gregsolid/types.hpp"

namespace gregsolid {

/// Scaled Jacobians of every cell corner, cell-major then corner 0..7, with
/// the elementwise split into the non-negative and non-positive parts
/// (values = positive + negative exactly).
struct JacobianVector {
    std::vector<double> values;
    std::vector<double> positive;  ///< max(J, 0) per entry
    std::vector<double> negative;  ///< min(J, 0) per entry
    std::vector<bool> degenerate_cells;  ///< cells with a zero-length corner edge
};

/// Scaled Jacobian at cell corner h: determinant of the three normalized
/// edge vectors leaving h, in the fixed corner-adjacency order.  A corner
/// edge shorter than 1e-14 makes the value 0; when `degenerate` is non-null
/// it is set accordingly.
double scaled_jacobian(const std::array<Vec3, 8>& cell, int h,
                       bool* degenerate = nullptr);

/// Derivative of scaled_jacobian(cell, h) with respect to the positions of
/// the four participating corners, as (corner index, dJ/dP) pairs: the three
/// adjacent corners followed by h itself.  All zero for a degenerate corner.
std::array<std::pair<int, Vec3>, 4> scaled_jacobian_gradient(
    const std::array<Vec3, 8>& cell, int h);

/// Scaled Jacobians of every cell of the mesh.
JacobianVector jacobian_vector(const HexGrid& mesh);

/// Both sparsity measures of the negative part: the count of strictly
/// negative entries and the sum of their magnitudes.
struct SparseNorms {
    int l0 = 0;
    double l1 = 0.0;
};
SparseNorms e_sparse(const JacobianVector& jv);

/// Positivity energy: sum of 1/(J + eps) over entries with J >= 0.
/// Throws ArgumentError for eps <= 0.
double e_positive(const JacobianVector& jv, double eps = defaults::epsilon);

/// Laplacian smoothness energy: sum over interior vertices of the squared
/// distance to the centroid of the edge-adjacent neighbors.  Boundary
/// vertices are fixed data and contribute nothing.
double e_smooth(const HexGrid& mesh);

/// Which sparsity norm enters the combined objective.
enum class SparseNorm { l0, l1 };

/// Combined objective E = E_smooth + mu * E_positive + nu * E_sparse with the
/// unweighted term values alongside.
struct ObjectiveBreakdown {
    double smooth = 0.0;
    double positive = 0.0;
    double sparse = 0.0;  ///< chosen norm; the l0 count as a real
    double total = 0.0;
};
ObjectiveBreakdown objective(const HexGrid& mesh, double mu, double nu,
                             double eps, SparseNorm norm);

/// Volume fraction of the cells that have at least one negative corner
/// Jacobian; cell volumes by the six-tetrahedron decomposition, taken by
/// magnitude.  Always in [0, 1].
double negative_volume_ratio(const HexGrid& mesh, const JacobianVector& jv);

/// Summary statistics over all corner Jacobians.
struct QualityReport {
    double avg_j = 0.0;
    double min_j = 0.0;
    double max_j = 0.0;
    double neg_ratio = 0.0;
    std::array<int, 3> resolution{0, 0, 0};
    double seconds = 0.0;
};
QualityReport make_quality_report(const HexGrid& mesh, const JacobianVector& jv,
                                  double seconds);

}  // namespace gregsolid
