#include <cstring>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gregsolid/boundary.hpp"
#include "gregsolid/domain.hpp"
#include "gregsolid/gregory.hpp"
#include "gregsolid/grid.hpp"
#include "gregsolid/synth.hpp"
#include "helpers.hpp"

using namespace gregsolid;

namespace {

struct SolidModel {
    std::shared_ptr<const PolyhedralDomain> domain;
    std::shared_ptr<const std::vector<BoundaryPatch>> patches;
    GregorySolid solid;
};

SolidModel build_synth_solid(const std::string& kind, double magnitude) {
    SynthModel m = synth_model(kind, magnitude);
    SolidModel out;
    out.domain = std::make_shared<const PolyhedralDomain>(build_domain(m.domain_shape));
    out.patches = std::make_shared<const std::vector<BoundaryPatch>>(
        ingest_patches(*out.domain, m.patches));
    out.solid = build_gregory_solid(out.domain, out.patches);
    return out;
}

/// Solid over the cube whose boundary surface is identically zero: every
/// face view and its transversal derivative vanish, so after writing random
/// values into the free controls the interpolator reduces to the tangent
/// corrections alone and the prescribed-derivative behavior can be checked
/// without any surface-approximation residual.
SolidModel build_zero_surface_solid(std::mt19937& rng) {
    SolidModel out;
    out.domain = std::make_shared<const PolyhedralDomain>(build_domain("hexahedron"));
    std::vector<PatchDescriptor> raw(out.domain->faces.size());
    for (auto& pd : raw) {
        pd.kind = PatchKind::sampled_grid;
        pd.params_u = {0.0, 1.0};
        pd.params_v = {0.0, 1.0};
        pd.points = {{Vec3::Zero(), Vec3::Zero()}, {Vec3::Zero(), Vec3::Zero()}};
    }
    out.patches = std::make_shared<const std::vector<BoundaryPatch>>(
        ingest_patches(*out.domain, raw));
    out.solid = build_gregory_solid(out.domain, out.patches);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    std::vector<double> x = pack_variables(out.solid);
    for (double& xi : x) xi = U(rng);
    unpack_variables(out.solid, x);
    return out;
}

Vec3 random_face_point(const PolyhedralDomain& d, int f, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto& cyc = d.faces[static_cast<std::size_t>(f)];
    std::vector<double> ws(cyc.size());
    double sum = 0.0;
    for (double& w : ws) {
        w = -std::log(U(rng) + 1e-12);
        sum += w;
    }
    Vec3 p = Vec3::Zero();
    for (std::size_t k = 0; k < cyc.size(); ++k)
        p += (ws[k] / sum) * d.corners[static_cast<std::size_t>(cyc[k])];
    return p;
}

Vec3 random_interior_point(const PolyhedralDomain& d, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> ws(d.corners.size());
    double sum = 0.0;
    for (double& w : ws) {
        w = -std::log(U(rng) + 1e-12);
        sum += w;
    }
    Vec3 p = Vec3::Zero();
    for (std::size_t k = 0; k < d.corners.size(); ++k) p += (ws[k] / sum) * d.corners[k];
    return p;
}

bool same_bits(const Vec3& a, const Vec3& b) {
    return std::memcmp(a.data(), b.data(), 3 * sizeof(double)) == 0;
}

/// Reference corner evaluator with every term written out individually and
/// its own guard handling; no coefficient merging.  Used as an independent
/// cross-check of the production evaluator.
Vec3 reference_corner_eval(const GregoryCornerInterpolator& g, double u, double v,
                           double w) {
    auto S = [&](int r, double a, double b) {
        return g.views[static_cast<std::size_t>(r)].eval(a, b);
    };
    auto T = [&](int r, double a, double b, int da, int db) {
        return g.patches[static_cast<std::size_t>(r)].eval(a, b, da, db);
    };
    Vec3 r = Vec3::Zero();
    r += S(0, u, v) + S(1, u, w) + S(2, v, w);
    r -= S(1, 0, w) + S(0, u, 0) + S(2, v, 0);
    r += S(0, 0, 0);

    r += w * T(0, u, v, 0, 0) + v * T(1, u, w, 0, 0) + u * T(2, v, w, 0, 0);

    const double g1 = u + v, g2 = v + w, g3 = u + w;
    {
        Vec3 blend;
        if (g1 < 1e-12)
            blend = 0.5 * u * v * (T(1, 0, w, 1, 0) + T(2, 0, w, 1, 0));
        else
            blend = (u * v / g1) * (v * T(1, 0, w, 1, 0) + u * T(2, 0, w, 1, 0));
        r -= v * T(1, 0, w, 0, 0) + u * T(2, 0, w, 0, 0) + blend;
    }
    {
        Vec3 blend;
        if (g2 < 1e-12)
            blend = 0.5 * v * w * (T(1, u, 0, 0, 1) + T(0, u, 0, 0, 1));
        else
            blend = (v * w / g2) * (v * T(1, u, 0, 0, 1) + w * T(0, u, 0, 0, 1));
        r -= w * T(0, u, 0, 0, 0) + v * T(1, u, 0, 0, 0) + blend;
    }
    {
        Vec3 blend;
        if (g3 < 1e-12)
            blend = 0.5 * u * w * (T(2, v, 0, 0, 1) + T(0, 0, v, 1, 0));
        else
            blend = (u * w / g3) * (u * T(2, v, 0, 0, 1) + w * T(0, 0, v, 1, 0));
        r -= w * T(0, 0, v, 0, 0) + u * T(2, v, 0, 0, 0) + blend;
    }
    r += u * T(2, 0, 0, 0, 0) + v * T(1, 0, 0, 0, 0) + w * T(0, 0, 0, 0, 0);
    {
        Vec3 b1, b2, b3, m;
        if (g1 < 1e-12)
            b1 = 0.5 * u * v * (T(1, 0, 0, 1, 0) + T(2, 0, 0, 1, 0));
        else
            b1 = (u * v / g1) * (v * T(1, 0, 0, 1, 0) + u * T(2, 0, 0, 1, 0));
        if (g2 < 1e-12)
            b2 = 0.5 * v * w * (T(1, 0, 0, 0, 1) + T(0, 0, 0, 0, 1));
        else
            b2 = (v * w / g2) * (v * T(1, 0, 0, 0, 1) + w * T(0, 0, 0, 0, 1));
        if (g3 < 1e-12)
            b3 = 0.5 * u * w * (T(2, 0, 0, 0, 1) + T(0, 0, 0, 1, 0));
        else
            b3 = (u * w / g3) * (u * T(2, 0, 0, 0, 1) + w * T(0, 0, 0, 1, 0));
        const double den = u * v * g1 + u * w * g3 + v * w * g2;
        if (den < 1e-12)
            m = (u * v * w / 3.0) *
                (T(2, 0, 0, 1, 1) + T(1, 0, 0, 1, 1) + T(0, 0, 0, 1, 1));
        else
            m = (u * v * w / den) * (u * u * g2 * T(2, 0, 0, 1, 1) +
                                     v * v * g3 * T(1, 0, 0, 1, 1) +
                                     w * w * g1 * T(0, 0, 0, 1, 1));
        r += b1 + b2 + b3 + m;
    }
    return r;
}

}  // namespace

TEST_CASE("corner evaluator matches the term-by-term reference") {
    std::mt19937 rng(0x5eed1234u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& [kind, mag] :
         std::vector<std::pair<std::string, double>>{{"hexahedron", 0.0},
                                                     {"twisted_prism", 0.6}}) {
        SolidModel m = kind == "hexahedron" ? build_synth_solid("cube", 0.0)
                                            : build_synth_solid(kind, mag);
        std::vector<double> x = pack_variables(m.solid);
        for (double& xi : x) xi += 0.3 * (U(rng) - 0.5);
        unpack_variables(m.solid, x);
        for (const auto& g : m.solid.interpolators) {
            for (int t = 0; t < 20; ++t) {
                const double u = U(rng), v = U(rng), w = U(rng);
                const Vec3 a = eval_corner_interpolator(g, u, v, w);
                const Vec3 b = reference_corner_eval(g, u, v, w);
                CHECK((a - b).norm() <= 1e-12);
            }
            // parameter-zero lines exercise the guard substitutions
            for (int t = 0; t < 5; ++t) {
                const double a = U(rng), b = U(rng);
                CHECK((eval_corner_interpolator(g, 0.0, a, b) -
                       reference_corner_eval(g, 0.0, a, b)).norm() <= 1e-12);
                CHECK((eval_corner_interpolator(g, a, 0.0, b) -
                       reference_corner_eval(g, a, 0.0, b)).norm() <= 1e-12);
                CHECK((eval_corner_interpolator(g, a, b, 0.0) -
                       reference_corner_eval(g, a, b, 0.0)).norm() <= 1e-12);
            }
        }
    }
}

TEST_CASE("restricting a parameter to zero reproduces the face views") {
    std::mt19937 rng(0x5eed4321u);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& [kind, mag] :
         std::vector<std::pair<std::string, double>>{{"cube", 0.0},
                                                     {"twisted_prism", 0.6},
                                                     {"bulged_pentaprism", 0.3}}) {
        SolidModel m = build_synth_solid(kind, mag);
        // randomized free controls must not disturb the face restrictions
        std::vector<double> x = pack_variables(m.solid);
        for (double& xi : x) xi += 0.5 * (U(rng) - 0.5);
        unpack_variables(m.solid, x);
        for (const auto& g : m.solid.interpolators) {
            for (int t = 0; t < 25; ++t) {
                const double a = U(rng), b = U(rng);
                CHECK((eval_corner_interpolator(g, a, b, 0.0) - g.views[0].eval(a, b))
                          .norm() <= 1e-9);
                CHECK((eval_corner_interpolator(g, a, 0.0, b) - g.views[1].eval(a, b))
                          .norm() <= 1e-9);
                CHECK((eval_corner_interpolator(g, 0.0, a, b) - g.views[2].eval(a, b))
                          .norm() <= 1e-9);
            }
            // the corner itself is reproduced exactly
            CHECK((eval_corner_interpolator(g, 0.0, 0.0, 0.0) - g.views[0].eval(0.0, 0.0))
                      .norm() <= 1e-12);
        }
    }
}

TEST_CASE("transversal derivatives at the faces equal the tangent patches") {
    std::mt19937 rng(0x5eedaaaau);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    SolidModel m = build_zero_surface_solid(rng);
    const double h = 1e-6;
    // second-order one-sided stencil: a central-difference-accuracy probe
    // that stays inside the parameter cube
    auto fd = [&](auto&& f) { return (-3.0 * f(0.0) + 4.0 * f(h) - f(2 * h)) / (2 * h); };
    for (const auto& g : m.solid.interpolators) {
        for (int t = 0; t < 25; ++t) {
            const double a = U(rng), b = U(rng);
            const Vec3 dw = fd([&](double s) { return eval_corner_interpolator(g, a, b, s); });
            const Vec3 tw = g.patches[0].eval(a, b);
            CHECK((dw - tw).norm() <= 1e-4 * std::max(tw.norm(), 1e-12));
            const Vec3 dv = fd([&](double s) { return eval_corner_interpolator(g, a, s, b); });
            const Vec3 tl = g.patches[1].eval(a, b);
            CHECK((dv - tl).norm() <= 1e-4 * std::max(tl.norm(), 1e-12));
            const Vec3 du = fd([&](double s) { return eval_corner_interpolator(g, s, a, b); });
            const Vec3 tr = g.patches[2].eval(a, b);
            CHECK((du - tr).norm() <= 1e-4 * std::max(tr.norm(), 1e-12));
        }
    }
}

TEST_CASE("corner evaluator rejects parameters outside the unit cube") {
    SolidModel m = build_synth_solid("cube", 0.0);
    const auto& g = m.solid.interpolators[0];
    CHECK_THROWS_AS(eval_corner_interpolator(g, -0.1, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(eval_corner_interpolator(g, 0.5, 1.1, 0.5), DomainError);
    CHECK_THROWS_AS(eval_corner_interpolator(g, 0.5, 0.5, -1.0), DomainError);
}

TEST_CASE("identity-cube solid reproduces boundary points") {
    std::mt19937 rng(0x5eedbeefu);
    SolidModel m = build_synth_solid("cube", 0.0);
    for (int f = 0; f < static_cast<int>(m.domain->faces.size()); ++f) {
        for (int t = 0; t < 200; ++t) {
            const Vec3 p = random_face_point(*m.domain, f, rng);
            CHECK((eval_solid(m.solid, p) - p).norm() <= 1e-8);
        }
    }
    for (std::size_t l = 0; l < m.domain->corners.size(); ++l) {
        const Vec3 c = m.domain->corners[l];
        CHECK((eval_solid(m.solid, c) - c).norm() <= 1e-9);
    }
}

TEST_CASE("solid interpolates the boundary surface on quad-faced models") {
    std::mt19937 rng(0x5eedc0deu);
    SolidModel m = build_synth_solid("twisted_prism", 0.6);
    const double tol = 1e-6 * m.domain->bbox_diagonal();
    for (int f = 0; f < static_cast<int>(m.domain->faces.size()); ++f) {
        for (int t = 0; t < 50; ++t) {
            const Vec3 p = random_face_point(*m.domain, f, rng);
            const Vec3 gs = eval_solid(m.solid, p);
            const Vec3 bs = (*m.patches)[static_cast<std::size_t>(f)].surface(p);
            CHECK((gs - bs).norm() <= tol);
        }
    }
    // corner points are reproduced tightly
    for (std::size_t l = 0; l < m.domain->corners.size(); ++l) {
        const Vec3 c = m.domain->corners[l];
        const Vec3 expect = m.solid.interpolators[l].views[0].eval(0.0, 0.0);
        CHECK((eval_solid(m.solid, c) - expect).norm() <= 1e-9);
    }
}

TEST_CASE("solid evaluation is deterministic") {
    std::mt19937 rng(0x5eed5555u);
    SolidModel m = build_synth_solid("twisted_prism", 1.2);
    for (int t = 0; t < 5; ++t) {
        const Vec3 p = random_interior_point(*m.domain, rng);
        const Vec3 a = eval_solid(m.solid, p);
        const Vec3 b = eval_solid(m.solid, p);
        CHECK(same_bits(a, b));
    }
}

TEST_CASE("translating the boundary data translates the solid") {
    std::mt19937 rng(0x5eed7777u);
    SynthModel raw = synth_model("twisted_prism", 0.6);
    auto dom = std::make_shared<const PolyhedralDomain>(build_domain(raw.domain_shape));
    auto pat = std::make_shared<const std::vector<BoundaryPatch>>(
        ingest_patches(*dom, raw.patches));
    GregorySolid s = build_gregory_solid(dom, pat);

    const Vec3 t(0.3, -0.2, 0.7);
    SynthModel shifted = raw;
    for (auto& pd : shifted.patches) {
        for (auto& row : pd.spline.control)
            for (auto& cp : row) cp += t;
        for (auto& row : pd.points)
            for (auto& cp : row) cp += t;
    }
    auto patT = std::make_shared<const std::vector<BoundaryPatch>>(
        ingest_patches(*dom, shifted.patches));
    GregorySolid sT = build_gregory_solid(dom, patT);

    for (int k = 0; k < 30; ++k) {
        const Vec3 p = random_interior_point(*dom, rng);
        CHECK((eval_solid(sT, p) - (eval_solid(s, p) + t)).norm() <= 1e-10);
    }
}

TEST_CASE("grid mapping keeps connectivity and boundary independence") {
    std::mt19937 rng(0x5eed9999u);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    SolidModel m = build_synth_solid("twisted_prism", 0.6);
    const HexGrid grid = generate_parametric_grid(*m.domain, 2, 2, 2);
    const HexGrid phys = map_grid(m.solid, grid);

    REQUIRE(phys.cells.size() == grid.cells.size());
    CHECK(std::memcmp(phys.cells.data(), grid.cells.data(),
                      grid.cells.size() * sizeof(grid.cells[0])) == 0);
    CHECK(phys.resolution == grid.resolution);
    CHECK(phys.on_boundary == grid.on_boundary);

    // perturb every free control: boundary vertices must not move at all
    GregorySolid perturbed = m.solid;
    std::vector<double> x = pack_variables(perturbed);
    for (double& xi : x) xi += U(rng);
    unpack_variables(perturbed, x);
    const HexGrid phys2 = map_grid(perturbed, grid);
    int interior_moved = 0;
    for (std::size_t n = 0; n < grid.vertices.size(); ++n) {
        if (grid.on_boundary[n]) {
            CHECK(same_bits(phys.vertices[n], phys2.vertices[n]));
        } else if (!same_bits(phys.vertices[n], phys2.vertices[n])) {
            ++interior_moved;
        }
    }
    CHECK(interior_moved > 0);
}

TEST_CASE("identity-cube grid mapping fixes boundary vertices") {
    SolidModel m = build_synth_solid("cube", 0.0);
    const HexGrid grid = generate_parametric_grid(*m.domain, 2, 2, 2);
    const HexGrid phys = map_grid(m.solid, grid);
    for (std::size_t n = 0; n < grid.vertices.size(); ++n)
        if (grid.on_boundary[n])
            CHECK((phys.vertices[n] - grid.vertices[n]).norm() <= 1e-8);
}

TEST_CASE("variable packing is a bijection over the free controls") {
    for (const auto& [kind, mag, want] :
         std::vector<std::tuple<std::string, double, std::size_t>>{
             {"cube", 0.0, 648}, {"twisted_prism", 1.2, 486},
             {"bulged_pentaprism", 0.3, 810}}) {
        SolidModel m = build_synth_solid(kind, mag);
        std::vector<double> x = pack_variables(m.solid);
        CHECK(x.size() == want);
        CHECK(m.solid.variable_map.size() * 3 == want);

        unpack_variables(m.solid, x);
        const std::vector<double> x2 = pack_variables(m.solid);
        CHECK(std::memcmp(x.data(), x2.data(), x.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("unpacking zeros clears the free controls, wrong length throws") {
    SolidModel m = build_synth_solid("cube", 0.0);
    std::vector<double> zeros(pack_variables(m.solid).size(), 0.0);
    unpack_variables(m.solid, zeros);
    for (const FreeControlRef& r : m.solid.variable_map) {
        const Vec3& c = m.solid.interpolators[static_cast<std::size_t>(r.corner)]
                            .patches[static_cast<std::size_t>(r.role)]
                            .patch.control[static_cast<std::size_t>(r.i)]
                                          [static_cast<std::size_t>(r.j)];
        CHECK(c.norm() == 0.0);
    }
    zeros.pop_back();
    CHECK_THROWS_AS(unpack_variables(m.solid, zeros), ArgumentError);
}

TEST_CASE("grid map cache reproduces direct evaluation and isolates the boundary") {
    std::mt19937 rng(0x5eedcafeu);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    SolidModel m = build_synth_solid("twisted_prism", 0.6);
    const HexGrid grid = generate_parametric_grid(*m.domain, 2, 2, 2);
    const GridMapCache cache = build_grid_map_cache(m.solid, grid);
    CHECK(cache.n_variables == static_cast<int>(m.solid.variable_map.size()));

    // at the build-time controls
    const std::vector<double> x0 = pack_variables(m.solid);
    const HexGrid phys0 = map_grid(m.solid, grid);
    const std::vector<Vec3> via0 = apply_grid_map_cache(cache, x0);
    for (std::size_t n = 0; n < via0.size(); ++n)
        CHECK((via0[n] - phys0.vertices[n]).norm() <= 1e-12);

    // at randomly perturbed controls, against a freshly updated solid
    std::vector<double> x = x0;
    for (double& xi : x) xi += U(rng);
    GregorySolid moved = m.solid;
    unpack_variables(moved, x);
    const HexGrid phys = map_grid(moved, grid);
    const std::vector<Vec3> via = apply_grid_map_cache(cache, x);
    for (std::size_t n = 0; n < via.size(); ++n)
        CHECK((via[n] - phys.vertices[n]).norm() <= 1e-12);

    // boundary vertices carry no variable coefficients at all
    for (std::size_t n = 0; n < grid.vertices.size(); ++n)
        if (grid.on_boundary[n]) CHECK(cache.coeffs[n].empty());

    std::vector<double> bad(x.size() - 1);
    CHECK_THROWS_AS(apply_grid_map_cache(cache, bad), ArgumentError);
}
