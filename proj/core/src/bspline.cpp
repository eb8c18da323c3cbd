#include "gregsolid/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gregsolid {

KnotVector KnotVector::clamped_uniform(int degree, int n_ctrl) {
    if (degree < 1) throw ArgumentError("knot vector: degree must be at least 1");
    if (n_ctrl < degree + 1) {
        std::ostringstream os;
        os << "knot vector: need at least " << degree + 1 << " control points for degree "
           << degree << ", got " << n_ctrl;
        throw ArgumentError(os.str());
    }
    KnotVector kv;
    kv.degree = degree;
    kv.knots.assign(static_cast<std::size_t>(n_ctrl + degree + 1), 0.0);
    const int segments = n_ctrl - degree;
    for (int i = 0; i <= degree; ++i) kv.knots[static_cast<std::size_t>(n_ctrl + i)] = 1.0;
    for (int i = 1; i < segments; ++i)
        kv.knots[static_cast<std::size_t>(degree + i)] = static_cast<double>(i) / segments;
    return kv;
}

void KnotVector::validate() const {
    if (degree < 1) throw ArgumentError("knot vector: degree must be at least 1");
    const int n = ctrl_count();
    if (n < degree + 1) throw ArgumentError("knot vector: too few knots for the degree");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (knots[i] < knots[i - 1])
            throw ArgumentError("knot vector: knots must be non-decreasing");
    }
    for (int i = 1; i <= degree; ++i) {
        if (knots[static_cast<std::size_t>(i)] != knots[0] ||
            knots[knots.size() - 1 - static_cast<std::size_t>(i)] != knots.back())
            throw ArgumentError("knot vector: ends must be clamped (degree+1 repeats)");
    }
    if (!(knots.back() > knots.front()))
        throw ArgumentError("knot vector: empty parameter range");
}

int KnotVector::find_span(double t) const {
    const int p = degree;
    const int n = ctrl_count() - 1;
    if (t >= knots[static_cast<std::size_t>(n + 1)]) return n;
    if (t <= knots[static_cast<std::size_t>(p)]) return p;
    int lo = p, hi = n + 1;
    int mid = (lo + hi) / 2;
    while (t < knots[static_cast<std::size_t>(mid)] ||
           t >= knots[static_cast<std::size_t>(mid + 1)]) {
        if (t < knots[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
        mid = (lo + hi) / 2;
    }
    return mid;
}

Eigen::MatrixXd KnotVector::basis_rows(double t, int order) const {
    // Cox-de Boor recursion with simultaneous derivative accumulation.
    const int p = degree;
    const int span = find_span(t);
    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(order + 1, p + 1);

    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(static_cast<std::size_t>(p + 1)),
        right(static_cast<std::size_t>(p + 1));
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[static_cast<std::size_t>(j)] = t - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        ndu(j, j) = saved;
    }
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

    const int kmax = std::min(order, p);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= kmax; ++k) {
        for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
        factor *= (p - k);
    }
    return ders;
}

Vec3 eval_curve(const BSplineCurve& curve, double t, int order) {
    const KnotVector& kv = curve.basis;
    if (static_cast<int>(curve.control.size()) != kv.ctrl_count())
        throw ArgumentError("curve: control point count does not match the knot vector");
    const int span = kv.find_span(t);
    const Eigen::MatrixXd ders = kv.basis_rows(t, order);
    Vec3 out = Vec3::Zero();
    for (int j = 0; j <= kv.degree; ++j)
        out += ders(order, j) * curve.control[static_cast<std::size_t>(span - kv.degree + j)];
    return out;
}

Vec3 eval_patch(const BSplinePatch& patch, double u, double v, int du, int dv) {
    const KnotVector& bu = patch.basis_u;
    const KnotVector& bv = patch.basis_v;
    if (static_cast<int>(patch.control.size()) != bu.ctrl_count())
        throw ArgumentError("patch: control net rows do not match the u knot vector");
    const int span_u = bu.find_span(u);
    const int span_v = bv.find_span(v);
    const Eigen::MatrixXd nu = bu.basis_rows(u, du);
    const Eigen::MatrixXd nv = bv.basis_rows(v, dv);
    Vec3 out = Vec3::Zero();
    for (int i = 0; i <= bu.degree; ++i) {
        const auto& row = patch.control[static_cast<std::size_t>(span_u - bu.degree + i)];
        if (static_cast<int>(row.size()) != bv.ctrl_count())
            throw ArgumentError("patch: control net columns do not match the v knot vector");
        Vec3 inner = Vec3::Zero();
        for (int j = 0; j <= bv.degree; ++j)
            inner += nv(dv, j) * row[static_cast<std::size_t>(span_v - bv.degree + j)];
        out += nu(du, i) * inner;
    }
    return out;
}

namespace {

bool is_single_segment(const KnotVector& kv) {
    const int p = kv.degree;
    if (kv.ctrl_count() != p + 1) return false;
    for (int i = 0; i <= p; ++i) {
        if (kv.knots[static_cast<std::size_t>(i)] != kv.knots[0]) return false;
        if (kv.knots[static_cast<std::size_t>(p + 1 + i)] != kv.knots.back()) return false;
    }
    return true;
}

}  // namespace

BSplineCurve degree_elevate(const BSplineCurve& curve, int times) {
    if (times < 0) throw ArgumentError("degree_elevate: times must be non-negative");
    if (!is_single_segment(curve.basis))
        throw ArgumentError("degree_elevate: supported for single-segment curves only");
    BSplineCurve out = curve;
    for (int step = 0; step < times; ++step) {
        const int p = out.basis.degree;
        std::vector<Vec3> raised(static_cast<std::size_t>(p + 2));
        raised.front() = out.control.front();
        raised.back() = out.control.back();
        for (int i = 1; i <= p; ++i) {
            const double alpha = static_cast<double>(i) / (p + 1);
            raised[static_cast<std::size_t>(i)] =
                alpha * out.control[static_cast<std::size_t>(i - 1)] +
                (1.0 - alpha) * out.control[static_cast<std::size_t>(i)];
        }
        out.control = std::move(raised);
        out.basis = KnotVector::clamped_uniform(p + 1, p + 2);
        out.basis.knots.front() = curve.basis.knots.front();
        for (auto& k : out.basis.knots)
            k = curve.basis.knots.front() +
                k * (curve.basis.knots.back() - curve.basis.knots.front());
    }
    return out;
}

BSplineCurve fit_curve_lsq(const std::vector<double>& params,
                           const std::vector<Vec3>& samples,
                           int degree, int n_ctrl) {
    if (params.size() != samples.size())
        throw ArgumentError("fit_curve_lsq: parameter and sample counts differ");
    if (static_cast<int>(params.size()) < n_ctrl)
        throw FittingError("fit_curve_lsq: fewer samples than control points");
    BSplineCurve out;
    out.basis = KnotVector::clamped_uniform(degree, n_ctrl);
    const int m = static_cast<int>(params.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n_ctrl);
    Eigen::MatrixXd b(m, 3);
    for (int k = 0; k < m; ++k) {
        const double t = params[static_cast<std::size_t>(k)];
        const int span = out.basis.find_span(t);
        const Eigen::MatrixXd row = out.basis.basis_rows(t, 0);
        for (int j = 0; j <= degree; ++j) A(k, span - degree + j) = row(0, j);
        b.row(k) = samples[static_cast<std::size_t>(k)].transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < n_ctrl) {
        std::ostringstream os;
        os << "fit_curve_lsq: collocation matrix is rank-deficient (rank " << qr.rank()
           << " of " << n_ctrl << "); spread the parameters or lower the control count";
        throw FittingError(os.str());
    }
    const Eigen::MatrixXd X = qr.solve(b);
    out.control.resize(static_cast<std::size_t>(n_ctrl));
    for (int i = 0; i < n_ctrl; ++i) out.control[static_cast<std::size_t>(i)] = X.row(i).transpose();
    return out;
}

}  // namespace gregsolid
