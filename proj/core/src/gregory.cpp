#include "gregsolid/gregory.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

#include "gregsolid/parallel.hpp"

namespace gregsolid {

namespace {

constexpr double kBlendGuard = 1e-12;
constexpr double kParamSlack = 1e-9;
constexpr double kWeightSkip = 1e-30;

/// One evaluation term of the corner interpolator: a signed coefficient on a
/// face-view sample (kind 0, always order zero) or a tangent-patch sample of
/// derivative order (da, db) (kind 1).
struct Term {
    int kind = 0;
    int role = 0;
    int da = 0;
    int db = 0;
    double a = 0.0;
    double b = 0.0;
    double coef = 0.0;
};

/// Term accumulator that merges entries with identical sample keys by summing
/// their coefficients.  Merging is what makes the boundary behavior exact:
/// whenever a parameter hits 0, sign pairs built from the same coefficient
/// value collapse to an exact 0.0 and the sample is never evaluated, so face
/// evaluations cannot depend on the tangent-patch interiors.
struct TermList {
    int n = 0;
    std::array<Term, 34> t{};

    void add(int kind, int role, int da, int db, double a, double b, double coef) {
        for (int m = 0; m < n; ++m) {
            Term& e = t[m];
            if (e.kind == kind && e.role == role && e.da == da && e.db == db &&
                e.a == a && e.b == b) {
                e.coef += coef;
                return;
            }
        }
        t[static_cast<std::size_t>(n++)] = Term{kind, role, da, db, a, b, coef};
    }
};

/// The merged term list of the corner interpolator at (u, v, w).
///
/// The structure is a Boolean sum: the three face views, minus their pairwise
/// overlaps along the shared boundary curves, plus corrections that restore
/// the prescribed transversal derivatives.  The rational blend factors combine
/// the two tangent patches meeting along each corner edge; each factor is
/// computed once and reused with both signs so merged pairs cancel exactly.
/// When a blend denominator vanishes the blended value degenerates to the
/// arithmetic mean of its constituents (their common limit), which is
/// multiplied by a vanishing monomial anyway.
TermList corner_terms(double u, double v, double w) {
    TermList list;

    // Face views and their overlap corrections.
    list.add(0, 0, 0, 0, u, v, 1.0);
    list.add(0, 1, 0, 0, u, w, 1.0);
    list.add(0, 2, 0, 0, v, w, 1.0);
    list.add(0, 1, 0, 0, 0.0, w, -1.0);
    list.add(0, 0, 0, 0, u, 0.0, -1.0);
    list.add(0, 2, 0, 0, v, 0.0, -1.0);
    list.add(0, 0, 0, 0, 0.0, 0.0, 1.0);

    // Rational edge blends.  b1 pairs lft/rgt across the w-edge, b2 pairs
    // lft/top across the u-edge, b3 pairs rgt/top across the v-edge; m blends
    // all three mixed corner twists.
    const double g1 = u + v;
    const double g2 = v + w;
    const double g3 = u + w;
    double b1l, b1r;
    if (g1 < kBlendGuard) {
        b1l = b1r = 0.5 * u * v;
    } else {
        b1l = u * v * v / g1;
        b1r = u * v * u / g1;
    }
    double b2l, b2t;
    if (g2 < kBlendGuard) {
        b2l = b2t = 0.5 * v * w;
    } else {
        b2l = v * w * v / g2;
        b2t = v * w * w / g2;
    }
    double b3r, b3t;
    if (g3 < kBlendGuard) {
        b3r = b3t = 0.5 * u * w;
    } else {
        b3r = u * w * u / g3;
        b3t = u * w * w / g3;
    }
    const double den = u * v * g1 + u * w * g3 + v * w * g2;
    double m_r, m_l, m_t;
    if (den < kBlendGuard) {
        m_r = m_l = m_t = u * v * w / 3.0;
    } else {
        m_r = u * v * w * u * u * g2 / den;
        m_l = u * v * w * v * v * g3 / den;
        m_t = u * v * w * w * w * g1 / den;
    }

    // Transversal corrections: full fields, their boundary-curve restrictions,
    // the blended first-derivative terms along the corner edges, and the
    // corner values and twists.
    list.add(1, 0, 0, 0, u, v, w);
    list.add(1, 1, 0, 0, u, w, v);
    list.add(1, 2, 0, 0, v, w, u);
    list.add(1, 1, 0, 0, 0.0, w, -v);
    list.add(1, 2, 0, 0, 0.0, w, -u);
    list.add(1, 1, 1, 0, 0.0, w, -b1l);
    list.add(1, 2, 1, 0, 0.0, w, -b1r);
    list.add(1, 0, 0, 0, u, 0.0, -w);
    list.add(1, 1, 0, 0, u, 0.0, -v);
    list.add(1, 1, 0, 1, u, 0.0, -b2l);
    list.add(1, 0, 0, 1, u, 0.0, -b2t);
    list.add(1, 2, 0, 0, v, 0.0, -u);
    list.add(1, 0, 0, 0, 0.0, v, -w);
    list.add(1, 2, 0, 1, v, 0.0, -b3r);
    list.add(1, 0, 1, 0, 0.0, v, -b3t);
    list.add(1, 2, 0, 0, 0.0, 0.0, u);
    list.add(1, 1, 0, 0, 0.0, 0.0, v);
    list.add(1, 0, 0, 0, 0.0, 0.0, w);
    list.add(1, 1, 1, 0, 0.0, 0.0, b1l);
    list.add(1, 2, 1, 0, 0.0, 0.0, b1r);
    list.add(1, 1, 0, 1, 0.0, 0.0, b2l);
    list.add(1, 0, 0, 1, 0.0, 0.0, b2t);
    list.add(1, 2, 0, 1, 0.0, 0.0, b3r);
    list.add(1, 0, 1, 0, 0.0, 0.0, b3t);
    list.add(1, 2, 1, 1, 0.0, 0.0, m_r);
    list.add(1, 1, 1, 1, 0.0, 0.0, m_l);
    list.add(1, 0, 1, 1, 0.0, 0.0, m_t);
    return list;
}

double clamp_param(double t, const char* name) {
    if (t < -kParamSlack || t > 1.0 + kParamSlack) {
        std::ostringstream oss;
        oss << "corner interpolator parameter " << name << " = " << t
            << " outside [0, 1]";
        throw DomainError(oss.str());
    }
    return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

}  // namespace

GregoryCornerInterpolator make_corner_interpolator(
    std::shared_ptr<const PolyhedralDomain> domain,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches, int l,
    int tangent_samples, double fd_step) {
    if (!domain || !patches) throw ArgumentError("corner interpolator: null domain or patches");
    if (l < 0 || l >= static_cast<int>(domain->corners.size()))
        throw ArgumentError("corner interpolator: corner index out of range");
    GregoryCornerInterpolator g;
    g.corner = l;
    g.views = make_corner_views(domain, patches, l);
    const CornerTangentSamples samples =
        estimate_corner_tangents(g.views, tangent_samples, fd_step);
    const TangentFieldSet fields = fit_tangent_fields(samples);
    g.patches = build_initial_tangent_patches(fields);
    return g;
}

GregorySolid build_gregory_solid(
    std::shared_ptr<const PolyhedralDomain> domain,
    std::shared_ptr<const std::vector<BoundaryPatch>> patches,
    int tangent_samples, double fd_step) {
    if (!domain || !patches) throw ArgumentError("gregory solid: null domain or patches");
    GregorySolid s;
    s.domain = domain;
    s.patches = patches;
    const int n = static_cast<int>(domain->corners.size());
    s.interpolators.reserve(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l)
        s.interpolators.push_back(
            make_corner_interpolator(domain, patches, l, tangent_samples, fd_step));
    for (int l = 0; l < n; ++l)
        for (int role = 0; role < 3; ++role)
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (s.interpolators[static_cast<std::size_t>(l)]
                            .patches[static_cast<std::size_t>(role)]
                            .free_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                        s.variable_map.push_back(FreeControlRef{l, role, i, j});
    return s;
}

Vec3 eval_corner_interpolator(const GregoryCornerInterpolator& g,
                              double u, double v, double w) {
    u = clamp_param(u, "u");
    v = clamp_param(v, "v");
    w = clamp_param(w, "w");
    const TermList list = corner_terms(u, v, w);
    Vec3 acc = Vec3::Zero();
    for (int m = 0; m < list.n; ++m) {
        const Term& e = list.t[static_cast<std::size_t>(m)];
        if (e.coef == 0.0) continue;
        if (e.kind == 0) {
            acc += e.coef * g.views[static_cast<std::size_t>(e.role)].eval(e.a, e.b);
        } else {
            acc += e.coef *
                   g.patches[static_cast<std::size_t>(e.role)].eval(e.a, e.b, e.da, e.db);
        }
    }
    return acc;
}

Vec3 eval_solid(const GregorySolid& s, const Vec3& p) {
    if (!s.domain) throw ArgumentError("gregory solid: empty solid");
    const PolyhedralDomain& d = *s.domain;
    const std::vector<double> weights = corner_weights(d, p);
    Vec3 acc = Vec3::Zero();
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const double wl = weights[l];
        if (wl < kWeightSkip) continue;
        const CornerCoordinates c = corner_coordinates(d, static_cast<int>(l), p);
        acc += wl * eval_corner_interpolator(s.interpolators[l], c.u, c.v, c.w);
    }
    return acc;
}

HexGrid map_grid(const GregorySolid& s, const HexGrid& grid) {
    HexGrid out = grid;
    parallel_for(grid.vertices.size(), [&](std::size_t n) {
        out.vertices[n] = eval_solid(s, grid.vertices[n]);
    });
    return out;
}

std::vector<double> pack_variables(const GregorySolid& s) {
    std::vector<double> x;
    x.reserve(3 * s.variable_map.size());
    for (const FreeControlRef& r : s.variable_map) {
        const Vec3& c = s.interpolators[static_cast<std::size_t>(r.corner)]
                            .patches[static_cast<std::size_t>(r.role)]
                            .patch.control[static_cast<std::size_t>(r.i)]
                                          [static_cast<std::size_t>(r.j)];
        x.push_back(c.x());
        x.push_back(c.y());
        x.push_back(c.z());
    }
    return x;
}

void unpack_variables(GregorySolid& s, const std::vector<double>& x) {
    if (x.size() != 3 * s.variable_map.size()) {
        std::ostringstream oss;
        oss << "variable vector length " << x.size() << " does not match "
            << 3 * s.variable_map.size() << " free control coordinates";
        throw ArgumentError(oss.str());
    }
    for (std::size_t m = 0; m < s.variable_map.size(); ++m) {
        const FreeControlRef& r = s.variable_map[m];
        s.interpolators[static_cast<std::size_t>(r.corner)]
            .patches[static_cast<std::size_t>(r.role)]
            .patch.control[static_cast<std::size_t>(r.i)][static_cast<std::size_t>(r.j)] =
            Vec3(x[3 * m], x[3 * m + 1], x[3 * m + 2]);
    }
}

namespace {

/// Splits one solid evaluation into the variable-independent base point plus
/// scalar factors on the free control points.  Follows exactly the same term
/// list as eval_solid, so the two agree to roundoff and vertices whose terms
/// all cancel (face points) receive no factors at all.
void decompose_point(const GregorySolid& s, const Vec3& p,
                     const std::vector<std::array<std::array<std::array<int, 4>, 4>, 3>>& rev,
                     Vec3* base, std::vector<std::pair<int, double>>* coeffs) {
    const PolyhedralDomain& d = *s.domain;
    const std::vector<double> weights = corner_weights(d, p);
    Vec3 acc = Vec3::Zero();
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const double wl = weights[l];
        if (wl < kWeightSkip) continue;
        const GregoryCornerInterpolator& g = s.interpolators[l];
        const CornerCoordinates c = corner_coordinates(d, static_cast<int>(l), p);
        const TermList list = corner_terms(c.u, c.v, c.w);
        double tacc[3][4][4] = {};
        for (int m = 0; m < list.n; ++m) {
            const Term& e = list.t[static_cast<std::size_t>(m)];
            if (e.coef == 0.0) continue;
            if (e.kind == 0) {
                acc += wl * e.coef * g.views[static_cast<std::size_t>(e.role)].eval(e.a, e.b);
                continue;
            }
            const BSplinePatch& bp = g.patches[static_cast<std::size_t>(e.role)].patch;
            const int span_u = bp.basis_u.find_span(e.a);
            const int span_v = bp.basis_v.find_span(e.b);
            const Eigen::MatrixXd nu = bp.basis_u.basis_rows(e.a, e.da);
            const Eigen::MatrixXd nv = bp.basis_v.basis_rows(e.b, e.db);
            for (int i = 0; i <= bp.basis_u.degree; ++i)
                for (int j = 0; j <= bp.basis_v.degree; ++j)
                    tacc[e.role][span_u - bp.basis_u.degree + i]
                        [span_v - bp.basis_v.degree + j] +=
                        e.coef * nu(e.da, i) * nv(e.db, j);
        }
        for (int role = 0; role < 3; ++role) {
            const TangentPatch& tp = g.patches[static_cast<std::size_t>(role)];
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double f = tacc[role][i][j];
                    if (f == 0.0) continue;
                    if (tp.free_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) {
                        coeffs->emplace_back(rev[l][static_cast<std::size_t>(role)]
                                                [static_cast<std::size_t>(i)]
                                                [static_cast<std::size_t>(j)],
                                             wl * f);
                    } else {
                        acc += wl * f *
                               tp.patch.control[static_cast<std::size_t>(i)]
                                               [static_cast<std::size_t>(j)];
                    }
                }
        }
    }
    *base = acc;
}

}  // namespace

GridMapCache build_grid_map_cache(const GregorySolid& s, const HexGrid& grid) {
    if (!s.domain) throw ArgumentError("gregory solid: empty solid");
    GridMapCache cache;
    cache.n_variables = static_cast<int>(s.variable_map.size());
    cache.base.resize(grid.vertices.size(), Vec3::Zero());
    cache.coeffs.resize(grid.vertices.size());

    std::vector<std::array<std::array<std::array<int, 4>, 4>, 3>> rev(
        s.domain->corners.size());
    for (auto& per_corner : rev)
        for (auto& per_role : per_corner)
            for (auto& row : per_role) row.fill(-1);
    for (std::size_t m = 0; m < s.variable_map.size(); ++m) {
        const FreeControlRef& r = s.variable_map[m];
        rev[static_cast<std::size_t>(r.corner)][static_cast<std::size_t>(r.role)]
           [static_cast<std::size_t>(r.i)][static_cast<std::size_t>(r.j)] =
            static_cast<int>(m);
    }

    parallel_for(grid.vertices.size(), [&](std::size_t n) {
        decompose_point(s, grid.vertices[n], rev, &cache.base[n], &cache.coeffs[n]);
    });
    return cache;
}

std::vector<Vec3> apply_grid_map_cache(const GridMapCache& cache,
                                       const std::vector<double>& x) {
    if (x.size() != 3 * static_cast<std::size_t>(cache.n_variables)) {
        std::ostringstream oss;
        oss << "variable vector length " << x.size() << " does not match "
            << 3 * cache.n_variables << " cached control coordinates";
        throw ArgumentError(oss.str());
    }
    std::vector<Vec3> out(cache.base.size());
    parallel_for(out.size(), [&](std::size_t n) {
        Vec3 p = cache.base[n];
        for (const auto& [m, f] : cache.coeffs[n]) {
            const std::size_t k = 3 * static_cast<std::size_t>(m);
            p += f * Vec3(x[k], x[k + 1], x[k + 2]);
        }
        out[n] = p;
    });
    return out;
}

}  // namespace gregsolid
