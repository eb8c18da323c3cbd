#include <doctest.h>

#include "gregsolid/bspline.hpp"
#include "helpers.hpp"

using namespace gregsolid;
namespace gt = gregsolid::testing;

namespace {

BSplineCurve random_curve(int degree, int n_ctrl) {
    BSplineCurve c;
    c.basis = KnotVector::clamped_uniform(degree, n_ctrl);
    for (int i = 0; i < n_ctrl; ++i) c.control.push_back(gt::random_vec3(-2.0, 2.0));
    return c;
}

BSplinePatch random_patch(int deg_u, int nu, int deg_v, int nv) {
    BSplinePatch p;
    p.basis_u = KnotVector::clamped_uniform(deg_u, nu);
    p.basis_v = KnotVector::clamped_uniform(deg_v, nv);
    p.control.resize(static_cast<std::size_t>(nu));
    for (auto& row : p.control)
        for (int j = 0; j < nv; ++j) row.push_back(gt::random_vec3(-2.0, 2.0));
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("bspline");

TEST_CASE("basis functions partition unity and derivative rows sum to zero") {
    for (int degree : {1, 2, 3, 4}) {
        for (int n_ctrl : {degree + 1, degree + 3, degree + 7}) {
            const KnotVector kv = KnotVector::clamped_uniform(degree, n_ctrl);
            for (int trial = 0; trial < 250; ++trial) {
                const double t = gt::uniform(0.0, 1.0);
                const Eigen::MatrixXd rows = kv.basis_rows(t, 2);
                CHECK(rows.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(std::abs(rows.row(1).sum()) <= 1e-9);
                CHECK(std::abs(rows.row(2).sum()) <= 1e-7);
                for (int j = 0; j <= degree; ++j) CHECK(rows(0, j) >= -1e-14);
            }
        }
    }
}

TEST_CASE("span lookup brackets the parameter and clamps the range ends") {
    const KnotVector kv = KnotVector::clamped_uniform(3, 8);
    CHECK(kv.find_span(0.0) == 3);
    CHECK(kv.find_span(1.0) == 7);
    CHECK(kv.find_span(1.5) == 7);
    CHECK(kv.find_span(-0.5) == 3);
    for (int trial = 0; trial < 200; ++trial) {
        const double t = gt::uniform(0.0, 1.0);
        const int s = kv.find_span(t);
        CHECK(kv.knots[static_cast<std::size_t>(s)] <= t);
        CHECK(t <= kv.knots[static_cast<std::size_t>(s + 1)] + 1e-15);
    }
}

TEST_CASE("clamped curves interpolate their end control points") {
    for (int degree : {1, 2, 3}) {
        const BSplineCurve c = random_curve(degree, degree + 4);
        gt::check_close(eval_curve(c, 0.0), c.control.front(), 1e-14);
        gt::check_close(eval_curve(c, 1.0), c.control.back(), 1e-14);
    }
}

TEST_CASE("curve derivatives match central differences") {
    const BSplineCurve c = random_curve(3, 8);
    for (int trial = 0; trial < 60; ++trial) {
        const double t = gt::uniform(0.02, 0.98);
        const Vec3 d1 = eval_curve(c, t, 1);
        const Vec3 fd1 = gt::central_diff([&](double s) { return eval_curve(c, s); }, t);
        gt::check_close_rel(d1, fd1, 1e-5);
        const Vec3 d2 = eval_curve(c, t, 2);
        const Vec3 fd2 =
            gt::central_diff([&](double s) { return eval_curve(c, s, 1); }, t);
        gt::check_close_rel(d2, fd2, 1e-4);
    }
}

TEST_CASE("single-segment cubic end derivatives come from the control legs") {
    BSplineCurve c;
    c.basis = KnotVector::clamped_uniform(3, 4);
    c.control = {Vec3(0, 0, 0), Vec3(1, 2, 0), Vec3(3, 1, 1), Vec3(4, 0, 2)};
    gt::check_close(eval_curve(c, 0.0, 1), 3.0 * (c.control[1] - c.control[0]), 1e-12);
    gt::check_close(eval_curve(c, 1.0, 1), 3.0 * (c.control[3] - c.control[2]), 1e-12);
}

TEST_CASE("derivatives beyond the degree vanish") {
    const BSplineCurve c = random_curve(2, 6);
    gt::check_close(eval_curve(c, 0.4, 3), Vec3::Zero(), 1e-12);
    gt::check_close(eval_curve(c, 0.4, 5), Vec3::Zero(), 1e-12);
}

TEST_CASE("linear precision: control points at Greville abscissae trace a line") {
    for (int degree : {2, 3, 4}) {
        const int n_ctrl = degree + 5;
        BSplineCurve c;
        c.basis = KnotVector::clamped_uniform(degree, n_ctrl);
        for (int i = 0; i < n_ctrl; ++i) {
            double g = 0.0;
            for (int k = 1; k <= degree; ++k)
                g += c.basis.knots[static_cast<std::size_t>(i + k)];
            g /= degree;
            c.control.push_back(Vec3(g, 2.0 * g - 1.0, 0.5 * g));
        }
        for (int trial = 0; trial < 50; ++trial) {
            const double t = gt::uniform(0.0, 1.0);
            gt::check_close(eval_curve(c, t), Vec3(t, 2.0 * t - 1.0, 0.5 * t), 1e-12);
        }
    }
}

TEST_CASE("patch derivatives match finite differences, including the mixed one") {
    const BSplinePatch p = random_patch(3, 6, 3, 5);
    for (int trial = 0; trial < 40; ++trial) {
        const double u = gt::uniform(0.05, 0.95);
        const double v = gt::uniform(0.05, 0.95);
        gt::check_close_rel(
            eval_patch(p, u, v, 1, 0),
            gt::central_diff([&](double s) { return eval_patch(p, s, v); }, u), 1e-5);
        gt::check_close_rel(
            eval_patch(p, u, v, 0, 1),
            gt::central_diff([&](double s) { return eval_patch(p, u, s); }, v), 1e-5);
        gt::check_close_rel(
            eval_patch(p, u, v, 1, 1),
            gt::central_diff([&](double s) { return eval_patch(p, s, v, 0, 1); }, u),
            1e-4);
    }
}

TEST_CASE("patch corners reproduce the corner control points") {
    const BSplinePatch p = random_patch(3, 4, 3, 4);
    gt::check_close(eval_patch(p, 0, 0), p.control[0][0], 1e-14);
    gt::check_close(eval_patch(p, 1, 0), p.control[3][0], 1e-14);
    gt::check_close(eval_patch(p, 0, 1), p.control[0][3], 1e-14);
    gt::check_close(eval_patch(p, 1, 1), p.control[3][3], 1e-14);
}

TEST_CASE("degree elevation preserves the traced curve") {
    BSplineCurve c;
    c.basis = KnotVector::clamped_uniform(1, 2);
    c.control = {Vec3(0, 0, 0), Vec3(1, 1, 1)};
    const BSplineCurve cubic = degree_elevate(c, 2);
    CHECK(cubic.basis.degree == 3);
    CHECK(cubic.control.size() == 4);
    gt::check_close(cubic.control[1], Vec3(1, 1, 1) / 3.0, 1e-15);
    gt::check_close(cubic.control[2], 2.0 * Vec3(1, 1, 1) / 3.0, 1e-15);

    BSplineCurve q;
    q.basis = KnotVector::clamped_uniform(3, 4);
    q.control = {Vec3(0, 0, 0), Vec3(1, 2, 0), Vec3(3, 1, 1), Vec3(4, 0, 2)};
    const BSplineCurve r = degree_elevate(q, 3);
    CHECK(r.basis.degree == 6);
    for (int trial = 0; trial < 50; ++trial) {
        const double t = gt::uniform(0.0, 1.0);
        gt::check_close(eval_curve(q, t), eval_curve(r, t), 1e-12);
    }
}

TEST_CASE("degree elevation rejects multi-segment curves") {
    const BSplineCurve c = random_curve(3, 6);
    CHECK_THROWS_AS(degree_elevate(c, 1), ArgumentError);
}

TEST_CASE("least-squares fit reproduces a constant exactly") {
    std::vector<double> params;
    std::vector<Vec3> samples;
    for (int k = 0; k < 20; ++k) {
        params.push_back(k / 19.0);
        samples.push_back(Vec3(1.5, -2.0, 0.25));
    }
    const BSplineCurve fit = fit_curve_lsq(params, samples, 3, 4);
    for (const Vec3& cp : fit.control) gt::check_close(cp, Vec3(1.5, -2.0, 0.25), 1e-10);
}

TEST_CASE("least-squares fit recovers a cubic it can represent") {
    BSplineCurve truth;
    truth.basis = KnotVector::clamped_uniform(3, 4);
    truth.control = {Vec3(0, 0, 0), Vec3(0.2, 1.4, -0.3), Vec3(0.9, 1.1, 0.8),
                     Vec3(1, 0, 1)};
    std::vector<double> params;
    std::vector<Vec3> samples;
    for (int k = 0; k < 25; ++k) {
        const double t = k / 24.0;
        params.push_back(t);
        samples.push_back(eval_curve(truth, t));
    }
    const BSplineCurve fit = fit_curve_lsq(params, samples, 3, 4);
    for (int i = 0; i < 4; ++i)
        gt::check_close(fit.control[static_cast<std::size_t>(i)],
                        truth.control[static_cast<std::size_t>(i)], 1e-9);
}

TEST_CASE("least-squares fit reports rank deficiency") {
    std::vector<double> params(12, 0.5);
    std::vector<Vec3> samples(12, Vec3(1, 2, 3));
    CHECK_THROWS_AS(fit_curve_lsq(params, samples, 3, 4), FittingError);
}

TEST_CASE("knot vector validation rejects malformed input") {
    KnotVector kv = KnotVector::clamped_uniform(3, 6);
    CHECK_NOTHROW(kv.validate());
    KnotVector bad = kv;
    bad.knots[4] = 2.0;  // breaks monotonicity
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    KnotVector unclamped = kv;
    unclamped.knots[0] = -0.5;
    CHECK_THROWS_AS(unclamped.validate(), ArgumentError);
}

TEST_SUITE_END();
