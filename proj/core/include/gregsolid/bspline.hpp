#pragma once

#include <vector>

#include "gregsolid/types.hpp"

namespace gregsolid {

/// Clamped B-spline basis: degree plus knot sequence.
struct KnotVector {
    int degree = 3;
    std::vector<double> knots;  ///< size = control count + degree + 1, non-decreasing

    /// Number of control points this basis expects.
    int ctrl_count() const { return static_cast<int>(knots.size()) - degree - 1; }

    /// Clamped knot vector with uniformly spaced interior knots on [0, 1].
    static KnotVector clamped_uniform(int degree, int n_ctrl);

    /// Index i with knots[i] <= t < knots[i+1]; the last non-empty span for t at
    /// or beyond the end of the parameter range.
    int find_span(double t) const;

    /// Values and derivatives of the degree+1 basis functions that are non-zero
    /// on the span containing t.  Row k holds the k-th derivatives of
    /// N_{span-degree+j} for j = 0..degree; rows beyond the degree are zero.
    Eigen::MatrixXd basis_rows(double t, int order) const;

    /// Throws ArgumentError when sizes, ordering, or clamping are inconsistent.
    void validate() const;
};

/// B-spline curve in 3-space.
struct BSplineCurve {
    KnotVector basis;
    std::vector<Vec3> control;
};

/// Tensor-product B-spline patch; control[i][j] pairs basis_u index i with
/// basis_v index j.
struct BSplinePatch {
    KnotVector basis_u;
    KnotVector basis_v;
    std::vector<std::vector<Vec3>> control;
};

/// Point (order = 0) or order-th derivative of the curve at t.
Vec3 eval_curve(const BSplineCurve& curve, double t, int order = 0);

/// Mixed partial derivative d^{du+dv} S / du^{du} dv^{dv} at (u, v).
Vec3 eval_patch(const BSplinePatch& patch, double u, double v, int du = 0, int dv = 0);

/// Raise the degree of a single-segment (Bezier) curve by `times`, preserving
/// the traced curve exactly.  Throws ArgumentError for multi-segment input.
BSplineCurve degree_elevate(const BSplineCurve& curve, int times);

/// Least-squares fit of a clamped B-spline curve of the given degree and
/// control count through (params[k], samples[k]) pairs.  Throws FittingError
/// when the collocation matrix is rank-deficient.
BSplineCurve fit_curve_lsq(const std::vector<double>& params,
                           const std::vector<Vec3>& samples,
                           int degree, int n_ctrl);

}  // namespace gregsolid
