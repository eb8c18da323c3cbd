#include "gregsolid/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace gregsolid {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// How far x falls outside [0, 1].
double range_violation(double x) { return std::max({-x, x - 1.0, 0.0}); }

/// Recovers (s, t) with bilinear(quad; s, t) = x for a convex quadrilateral
/// given by its chart-coordinate corners in the order (0,0),(1,0),(1,1),(0,1).
Vec2 inverse_bilinear(const std::array<Vec2, 4>& quad, const Vec2& x) {
    const Vec2 e = quad[1] - quad[0];
    const Vec2 f = quad[3] - quad[0];
    const Vec2 g = quad[0] - quad[1] + quad[2] - quad[3];
    const Vec2 h = x - quad[0];

    // t (f + s g) = h - s e; crossing with (f + s g) leaves a quadratic in s.
    const double qa = -cross2(e, g);
    const double qb = cross2(h, g) - cross2(e, f);
    const double qc = cross2(h, f);

    double roots[2];
    int n_roots = 0;
    if (std::abs(qa) < 1e-12) {
        if (std::abs(qb) < 1e-300)
            throw NumericError("inverse bilinear: degenerate quadrilateral");
        roots[n_roots++] = -qc / qb;
    } else {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) {
            if (disc < -1e-10 * (qb * qb + std::abs(4.0 * qa * qc) + 1e-30))
                throw NumericError("inverse bilinear: no real solution");
            disc = 0.0;
        }
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        roots[n_roots++] = q / qa;
        if (std::abs(q) > 1e-300) roots[n_roots++] = qc / q;
    }

    Vec2 best = Vec2::Zero();
    double best_score = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_roots; ++r) {
        const double s = roots[r];
        const Vec2 denom = f + s * g;
        const double d2 = denom.squaredNorm();
        if (d2 < 1e-20) continue;
        const double t = (h - s * e).dot(denom) / d2;
        const double score = std::max(range_violation(s), range_violation(t));
        if (score < best_score) {
            best_score = score;
            best = Vec2(s, t);
        }
    }
    if (best_score > 1e-6)
        throw DomainError("inverse bilinear: point is not on the patch's face");
    return Vec2(std::clamp(best.x(), 0.0, 1.0), std::clamp(best.y(), 0.0, 1.0));
}

int locate_interval(const std::vector<double>& params, double s) {
    const int n = static_cast<int>(params.size());
    int i = static_cast<int>(std::upper_bound(params.begin(), params.end(), s) -
                             params.begin()) - 1;
    return std::clamp(i, 0, n - 2);
}

[[noreturn]] void fail_face(int face, const std::string& what) {
    std::ostringstream os;
    os << "patch for face " << face << ": " << what;
    throw IngestionError(os.str());
}

void validate_tensor(const PolyhedralDomain& d, int f, const PatchDescriptor& raw,
                     BoundaryPatch& out) {
    try {
        raw.spline.basis_u.validate();
        raw.spline.basis_v.validate();
    } catch (const Error& e) {
        fail_face(f, e.what());
    }
    const int nu = raw.spline.basis_u.ctrl_count();
    const int nv = raw.spline.basis_v.ctrl_count();
    if (static_cast<int>(raw.spline.control.size()) != nu)
        fail_face(f, "control net row count does not match the u knot vector");
    for (const auto& row : raw.spline.control)
        if (static_cast<int>(row.size()) != nv)
            fail_face(f, "control net column count does not match the v knot vector");

    const std::vector<int>& cycle = d.faces[f];
    if (cycle.size() != 4)
        fail_face(f, "tensor-spline patches require a quadrilateral face");
    for (int k = 0; k < 4; ++k) {
        const int ca = raw.face_corners[static_cast<std::size_t>(k)];
        const int cb = raw.face_corners[static_cast<std::size_t>((k + 1) % 4)];
        if (!d.face_contains(f, ca))
            fail_face(f, "face-corner correspondence names a corner off the face");
        bool adjacent = false;
        for (int m = 0; m < 4; ++m) {
            const int fa = cycle[static_cast<std::size_t>(m)];
            const int fb = cycle[static_cast<std::size_t>((m + 1) % 4)];
            if ((fa == ca && fb == cb) || (fa == cb && fb == ca)) adjacent = true;
        }
        if (ca == cb || !adjacent)
            fail_face(f, "face-corner correspondence does not walk the face cycle");
    }
    out.spline = raw.spline;
    for (int k = 0; k < 4; ++k)
        out.quad_chart[static_cast<std::size_t>(k)] =
            out.chart.to_chart(d.corners[static_cast<std::size_t>(raw.face_corners[static_cast<std::size_t>(k)])]);
}

void validate_sampled(int f, const PatchDescriptor& raw, BoundaryPatch& out) {
    const std::size_t nu = raw.params_u.size();
    const std::size_t nv = raw.params_v.size();
    if (nu < 2 || nv < 2) fail_face(f, "sampled grid needs at least 2x2 samples");
    for (std::size_t i = 1; i < nu; ++i)
        if (!(raw.params_u[i] > raw.params_u[i - 1]))
            fail_face(f, "sampled grid u parameters must be strictly increasing");
    for (std::size_t i = 1; i < nv; ++i)
        if (!(raw.params_v[i] > raw.params_v[i - 1]))
            fail_face(f, "sampled grid v parameters must be strictly increasing");
    if (raw.points.size() != nu)
        fail_face(f, "sampled grid row count does not match params_u");
    for (const auto& row : raw.points)
        if (row.size() != nv)
            fail_face(f, "sampled grid column count does not match params_v");
    out.params_u = raw.params_u;
    out.params_v = raw.params_v;
    out.points = raw.points;
}

}  // namespace

Vec3 BoundaryPatch::surface_at_chart(const Vec2& st) const {
    if (kind == PatchKind::tensor_spline) {
        const Vec2 uv = inverse_bilinear(quad_chart, st);
        return eval_patch(spline, uv.x(), uv.y());
    }
    const double slack = 1e-7;
    double s = st.x();
    double t = st.y();
    if (s < params_u.front() - slack || s > params_u.back() + slack ||
        t < params_v.front() - slack || t > params_v.back() + slack)
        throw DomainError("sampled patch: chart coordinates outside the sampled range");
    s = std::clamp(s, params_u.front(), params_u.back());
    t = std::clamp(t, params_v.front(), params_v.back());
    const int iu = locate_interval(params_u, s);
    const int iv = locate_interval(params_v, t);
    const double du = params_u[static_cast<std::size_t>(iu) + 1] - params_u[static_cast<std::size_t>(iu)];
    const double dv = params_v[static_cast<std::size_t>(iv) + 1] - params_v[static_cast<std::size_t>(iv)];
    const double a = (s - params_u[static_cast<std::size_t>(iu)]) / du;
    const double b = (t - params_v[static_cast<std::size_t>(iv)]) / dv;
    const auto& p00 = points[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iv)];
    const auto& p10 = points[static_cast<std::size_t>(iu) + 1][static_cast<std::size_t>(iv)];
    const auto& p01 = points[static_cast<std::size_t>(iu)][static_cast<std::size_t>(iv) + 1];
    const auto& p11 = points[static_cast<std::size_t>(iu) + 1][static_cast<std::size_t>(iv) + 1];
    return (1.0 - a) * (1.0 - b) * p00 + a * (1.0 - b) * p10 +
           (1.0 - a) * b * p01 + a * b * p11;
}

Vec3 BoundaryPatch::surface(const Vec3& q) const {
    return surface_at_chart(chart.to_chart(q));
}

std::vector<BoundaryPatch> ingest_patches(const PolyhedralDomain& d,
                                          const std::vector<PatchDescriptor>& raw) {
    const std::size_t nf = d.faces.size();
    if (raw.size() != nf) {
        std::ostringstream os;
        if (raw.size() < nf)
            os << "missing patch for face " << raw.size() << " (got " << raw.size()
               << " descriptors for " << nf << " faces)";
        else
            os << "got " << raw.size() << " patch descriptors for " << nf << " faces";
        throw IngestionError(os.str());
    }

    std::vector<BoundaryPatch> out(nf);
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    auto grow = [&](const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    for (std::size_t f = 0; f < nf; ++f) {
        BoundaryPatch& bp = out[f];
        bp.face = static_cast<int>(f);
        bp.kind = raw[f].kind;
        bp.chart = face_chart(d, static_cast<int>(f));
        if (raw[f].kind == PatchKind::tensor_spline) {
            validate_tensor(d, static_cast<int>(f), raw[f], bp);
            for (const auto& row : bp.spline.control)
                for (const auto& p : row) grow(p);
        } else {
            validate_sampled(static_cast<int>(f), raw[f], bp);
            for (const auto& row : bp.points)
                for (const auto& p : row) grow(p);
        }
    }

    const double diag = std::max((hi - lo).norm(), 1e-12);
    const double tol = 1e-7 * diag;
    const int n_samples = 64;
    for (std::size_t e = 0; e < d.edges.size(); ++e) {
        const auto& ab = d.edges[e];
        const auto& ff = d.edge_faces[e];
        const Vec3& ca = d.corners[static_cast<std::size_t>(ab[0])];
        const Vec3& cb = d.corners[static_cast<std::size_t>(ab[1])];
        for (int k = 0; k < n_samples; ++k) {
            const double tau = static_cast<double>(k) / (n_samples - 1);
            const Vec3 q = ca + tau * (cb - ca);
            const Vec3 p1 = out[static_cast<std::size_t>(ff[0])].surface(q);
            const Vec3 p2 = out[static_cast<std::size_t>(ff[1])].surface(q);
            const double gap = (p1 - p2).norm();
            if (gap > tol) {
                std::ostringstream os;
                os << "patches for faces " << ff[0] << " and " << ff[1]
                   << " disagree along edge (" << ab[0] << ", " << ab[1] << "): gap "
                   << gap << " exceeds " << tol;
                throw IngestionError(os.str());
            }
        }
    }
    return out;
}

Vec3 CornerPatchView::eval(double a, double b) const {
    const Vec3 q = invert_face_coordinates(*domain, corner, role, a, b);
    return (*patches)[static_cast<std::size_t>(face)].surface(q);
}

std::array<CornerPatchView, 3> make_corner_views(
    std::shared_ptr<const PolyhedralDomain> d,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches, int l) {
    std::array<CornerPatchView, 3> views;
    const FaceRole roles[3] = {FaceRole::top, FaceRole::lft, FaceRole::rgt};
    for (int r = 0; r < 3; ++r) {
        CornerPatchView& v = views[static_cast<std::size_t>(r)];
        v.domain = d;
        v.patches = patches;
        v.corner = l;
        v.role = roles[r];
        v.face = d->face_of_role(l, roles[r]);
    }
    return views;
}

TangentSamples estimate_cross_tangents(const CornerPatchView& view, int along_axis,
                                       int samples, double h) {
    if (samples < 8)
        throw ArgumentError("estimate_cross_tangents: need at least 8 samples");
    if (along_axis != 0 && along_axis != 1)
        throw ArgumentError("estimate_cross_tangents: along_axis must be 0 or 1");
    TangentSamples out;
    out.t.resize(static_cast<std::size_t>(samples));
    out.v.resize(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        out.t[static_cast<std::size_t>(k)] = t;
        Vec3 base, shifted;
        if (along_axis == 0) {
            base = view.eval(t, 0.0);
            shifted = view.eval(t, h);
        } else {
            base = view.eval(0.0, t);
            shifted = view.eval(h, t);
        }
        out.v[static_cast<std::size_t>(k)] = (shifted - base) / h;
    }
    return out;
}

CornerTangentSamples estimate_corner_tangents(const std::array<CornerPatchView, 3>& views,
                                              int samples, double h) {
    const CornerPatchView& top = views[0];
    const CornerPatchView& lft = views[1];
    const CornerPatchView& rgt = views[2];
    CornerTangentSamples out;
    out.p_lft = estimate_cross_tangents(lft, 0, samples, h);
    out.p_rgt = estimate_cross_tangents(top, 0, samples, h);
    out.q_lft = estimate_cross_tangents(top, 1, samples, h);
    out.q_rgt = estimate_cross_tangents(rgt, 0, samples, h);
    out.r_lft = estimate_cross_tangents(rgt, 1, samples, h);
    out.r_rgt = estimate_cross_tangents(lft, 1, samples, h);
    return out;
}

TangentFieldSet fit_tangent_fields(const CornerTangentSamples& samples) {
    auto fit = [](const TangentSamples& s) {
        return fit_curve_lsq(s.t, s.v, 3, 4);
    };
    TangentFieldSet f;
    f.p_lft = fit(samples.p_lft);
    f.p_rgt = fit(samples.p_rgt);
    f.q_lft = fit(samples.q_lft);
    f.q_rgt = fit(samples.q_rgt);
    f.r_lft = fit(samples.r_lft);
    f.r_rgt = fit(samples.r_rgt);

    auto weld = [](BSplineCurve& a, BSplineCurve& b) {
        const Vec3 avg = 0.5 * (a.control.front() + b.control.front());
        a.control.front() = avg;
        b.control.front() = avg;
    };
    weld(f.r_rgt, f.q_lft);
    weld(f.p_rgt, f.r_lft);
    weld(f.q_rgt, f.p_lft);
    return f;
}

namespace {

TangentPatch make_tangent_patch(const BSplineCurve& row, const BSplineCurve& col) {
    const Vec3 a0 = row.control[0];  // equals col.control[0] after welding
    const Vec3 a3 = row.control[3];
    const Vec3 b3 = col.control[3];
    const Vec3 mid = 0.5 * (a3 + b3);
    const Vec3 far = mid + 2.0 * (mid - a0);

    TangentPatch tp;
    tp.patch.basis_u = KnotVector::clamped_uniform(3, 4);
    tp.patch.basis_v = KnotVector::clamped_uniform(3, 4);
    tp.patch.control.assign(4, std::vector<Vec3>(4, Vec3::Zero()));
    auto& c = tp.patch.control;
    for (int i = 0; i < 4; ++i) c[static_cast<std::size_t>(i)][0] = row.control[static_cast<std::size_t>(i)];
    for (int j = 0; j < 4; ++j) c[0][static_cast<std::size_t>(j)] = col.control[static_cast<std::size_t>(j)];
    // The two remaining boundaries are straight segments to the far corner,
    // written as cubics.
    c[3][1] = (2.0 * a3 + far) / 3.0;
    c[3][2] = (a3 + 2.0 * far) / 3.0;
    c[3][3] = far;
    c[1][3] = (2.0 * b3 + far) / 3.0;
    c[2][3] = (b3 + 2.0 * far) / 3.0;
    // Interior: bilinearly blended Coons fill in Bezier form.
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const double x = i / 3.0;
            const double y = j / 3.0;
            const std::size_t si = static_cast<std::size_t>(i);
            const std::size_t sj = static_cast<std::size_t>(j);
            c[si][sj] = (1.0 - y) * c[si][0] + y * c[si][3] +
                        (1.0 - x) * c[0][sj] + x * c[3][sj] -
                        ((1.0 - x) * (1.0 - y) * c[0][0] + x * (1.0 - y) * c[3][0] +
                         (1.0 - x) * y * c[0][3] + x * y * c[3][3]);
        }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            tp.free_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = (i > 0 && j > 0);
    return tp;
}

}  // namespace

std::array<TangentPatch, 3> build_initial_tangent_patches(const TangentFieldSet& fields) {
    return {make_tangent_patch(fields.p_lft, fields.q_rgt),
            make_tangent_patch(fields.p_rgt, fields.r_lft),
            make_tangent_patch(fields.q_lft, fields.r_rgt)};
}

}  // namespace gregsolid
