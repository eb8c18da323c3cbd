#include "gregsolid/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace gregsolid {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Coordinates this close to zero are produced by round-off of points lying
// exactly on a coordinate plane; snapping them keeps face/edge/corner
// evaluations on their exact strata.
constexpr double kCoordSnap = 1e-12;

Vec3 newell_normal(const std::vector<Vec3>& pts, const std::vector<int>& cycle) {
    Vec3 n = Vec3::Zero();
    const std::size_t m = cycle.size();
    for (std::size_t s = 0; s < m; ++s) {
        const Vec3& a = pts[cycle[s]];
        const Vec3& b = pts[cycle[(s + 1) % m]];
        n += a.cross(b);
    }
    return n;
}

double polygon_signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t s = 0; s < poly.size(); ++s) {
        const Vec2& p = poly[s];
        const Vec2& q = poly[(s + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

bool point_in_convex_polygon(const std::vector<Vec2>& poly, const Vec2& q, double tol) {
    for (std::size_t s = 0; s < poly.size(); ++s) {
        const Vec2& a = poly[s];
        const Vec2& b = poly[(s + 1) % poly.size()];
        const double cross = (b.x() - a.x()) * (q.y() - a.y()) - (b.y() - a.y()) * (q.x() - a.x());
        if (cross < -tol) return false;
    }
    return true;
}

Vec2 project_to_convex_polygon(const std::vector<Vec2>& poly, const Vec2& q) {
    if (point_in_convex_polygon(poly, q, 0.0)) return q;
    double best_d2 = std::numeric_limits<double>::infinity();
    Vec2 best = poly[0];
    for (std::size_t s = 0; s < poly.size(); ++s) {
        const Vec2& a = poly[s];
        const Vec2& b = poly[(s + 1) % poly.size()];
        const Vec2 ab = b - a;
        const double len2 = ab.squaredNorm();
        double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 cand = a + t * ab;
        const double d2 = (q - cand).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = cand;
        }
    }
    return best;
}

double polygon_boundary_distance(const std::vector<Vec2>& poly, const Vec2& q) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < poly.size(); ++s) {
        const Vec2& a = poly[s];
        const Vec2& b = poly[(s + 1) % poly.size()];
        const Vec2 ab = b - a;
        const double len2 = ab.squaredNorm();
        double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, (q - (a + t * ab)).norm());
    }
    return best;
}

struct RingSpec {
    int m = 0;          // corners per ring; 0 means no ring structure (tetrahedron)
    double radius = 0.0;
};

std::vector<Vec3> ring_corners(const RingSpec& ring) {
    std::vector<Vec3> pts;
    pts.reserve(2 * static_cast<std::size_t>(ring.m));
    for (int level = 0; level < 2; ++level) {
        const double z = level == 0 ? -0.5 : 0.5;
        for (int s = 0; s < ring.m; ++s) {
            const double theta = 0.5 * kPi + 2.0 * kPi * s / ring.m;
            pts.emplace_back(ring.radius * std::cos(theta), ring.radius * std::sin(theta), z);
        }
    }
    return pts;
}

std::vector<std::vector<int>> ring_faces(int m) {
    std::vector<std::vector<int>> faces;
    std::vector<int> bottom(m), top(m);
    for (int s = 0; s < m; ++s) bottom[s] = s;
    for (int s = 0; s < m; ++s) top[s] = m + s;
    faces.push_back(bottom);
    faces.push_back(top);
    for (int s = 0; s < m; ++s) {
        const int s1 = (s + 1) % m;
        faces.push_back({s, s1, m + s1, m + s});
    }
    return faces;
}

// Internal face-restricted coordinate pair with chart-space Jacobian.
struct FacePairEval {
    Vec2 c;
    Eigen::Matrix2d jac;
};

FacePairEval eval_face_pair(const FaceCoordInverter& inv, const Vec2& xy, bool want_jac) {
    FacePairEval out;
    out.jac.setZero();
    const Vec3 q = inv.chart.to_space(xy);
    const Vec3 axis_x = inv.chart.width * inv.chart.e1;
    const Vec3 axis_y = inv.chart.height * inv.chart.e2;

    const Vec3 normals[2] = {inv.plane_n1, inv.plane_n2};
    const Vec3 opps[2] = {inv.opp1, inv.opp2};
    for (int c = 0; c < 2; ++c) {
        double dp = normals[c].dot(q - inv.corner_pos);
        if (dp < 0.0) dp = 0.0;
        const Vec3 to_opp = q - opps[c];
        const double dc = to_opp.norm();
        const double denom = dp + dc;
        if (denom < 1e-300) {
            throw NumericError("face coordinate undefined: point coincides with its distance corner");
        }
        out.c[c] = dp / denom;
        if (want_jac) {
            const Vec3 grad_dp = normals[c];
            const Vec3 grad_dc = dc > 1e-14 ? Vec3(to_opp / dc) : Vec3(Vec3::Zero());
            const Vec3 grad = (dc * grad_dp - dp * grad_dc) / (denom * denom);
            out.jac(c, 0) = grad.dot(axis_x);
            out.jac(c, 1) = grad.dot(axis_y);
        }
    }
    return out;
}

// Preference factor between competing preimage branches: candidates whose
// corner weights differ by less than this factor count as the same branch and
// are ranked by proximity instead.
constexpr double kBranchDominance = 1.25;

void build_seed_table(FaceCoordInverter& inv, const PolyhedralDomain& d) {
    const int scan = 65;
    const int res = inv.seed_res;
    inv.seeds.assign(static_cast<std::size_t>(res) * res, Vec2(-1.0, -1.0));
    std::vector<double> best_d2(static_cast<std::size_t>(res) * res,
                                std::numeric_limits<double>::infinity());
    std::vector<double> best_w(static_cast<std::size_t>(res) * res, -1.0);
    for (int gy = 0; gy < scan; ++gy) {
        for (int gx = 0; gx < scan; ++gx) {
            const Vec2 xy(static_cast<double>(gx) / (scan - 1), static_cast<double>(gy) / (scan - 1));
            if (!point_in_convex_polygon(inv.chart.polygon, xy, 1e-9)) continue;
            const FacePairEval fe = eval_face_pair(inv, xy, false);
            const int ia = std::clamp(static_cast<int>(std::lround(fe.c.x() * (res - 1))), 0, res - 1);
            const int ib = std::clamp(static_cast<int>(std::lround(fe.c.y() * (res - 1))), 0, res - 1);
            const Vec2 center(static_cast<double>(ia) / (res - 1), static_cast<double>(ib) / (res - 1));
            const double d2 = (fe.c - center).squaredNorm();
            const double w = corner_weight(d, inv.corner, inv.chart.to_space(xy));
            const std::size_t idx = static_cast<std::size_t>(ib) * res + ia;
            // The coordinate pair can carry several face points to the same
            // bucket (the map folds on pentagonal faces).  Prefer the branch
            // the solid actually weights; break near-ties by bucket proximity.
            const bool take = inv.seeds[idx].x() < 0.0 ||
                              w > kBranchDominance * best_w[idx] ||
                              (w * kBranchDominance >= best_w[idx] && d2 < best_d2[idx]);
            if (take) {
                best_d2[idx] = d2;
                best_w[idx] = w;
                inv.seeds[idx] = xy;
            }
        }
    }
    // Flood-fill empty buckets from their filled neighbors.
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < inv.seeds.size(); ++i) {
        if (inv.seeds[i].x() >= 0.0) queue.push_back(i);
    }
    if (queue.empty()) {
        throw NumericError("face coordinate seed table empty: face polygon degenerate");
    }
    while (!queue.empty()) {
        const std::size_t idx = queue.front();
        queue.pop_front();
        const int ia = static_cast<int>(idx % res);
        const int ib = static_cast<int>(idx / res);
        const int nb[4][2] = {{ia + 1, ib}, {ia - 1, ib}, {ia, ib + 1}, {ia, ib - 1}};
        for (const auto& n : nb) {
            if (n[0] < 0 || n[0] >= res || n[1] < 0 || n[1] >= res) continue;
            const std::size_t nidx = static_cast<std::size_t>(n[1]) * res + n[0];
            if (inv.seeds[nidx].x() < 0.0) {
                inv.seeds[nidx] = inv.seeds[idx];
                queue.push_back(nidx);
            }
        }
    }
}

struct LmOutcome {
    Vec2 xy;
    Vec2 residual;
    bool converged = false;
};

LmOutcome run_lm(const FaceCoordInverter& inv, const Vec2& target, Vec2 xy, int max_iters) {
    LmOutcome out;
    double lambda = 1e-8;
    FacePairEval fe = eval_face_pair(inv, xy, true);
    Vec2 r = fe.c - target;
    double f = 0.5 * r.squaredNorm();
    int tiny_steps = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
        if (r.cwiseAbs().maxCoeff() < 1e-13) break;
        const Eigen::Matrix2d jt = fe.jac.transpose();
        const Eigen::Matrix2d jtj = jt * fe.jac;
        const Vec2 g = jt * r;
        bool accepted = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::Matrix2d m = jtj;
            m(0, 0) += lambda;
            m(1, 1) += lambda;
            const Vec2 delta = m.ldlt().solve(-g);
            const Vec2 trial = project_to_convex_polygon(inv.chart.polygon, xy + delta);
            FacePairEval fe_trial = eval_face_pair(inv, trial, true);
            const Vec2 r_trial = fe_trial.c - target;
            const double f_trial = 0.5 * r_trial.squaredNorm();
            if (f_trial < f) {
                if ((trial - xy).norm() < 1e-14) {
                    ++tiny_steps;
                } else {
                    tiny_steps = 0;
                }
                xy = trial;
                fe = fe_trial;
                r = r_trial;
                f = f_trial;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted || tiny_steps >= 2) break;
    }
    out.xy = xy;
    out.residual = r;
    out.converged = r.cwiseAbs().maxCoeff() < 1e-10;
    return out;
}

Vec2 grid_rescan_seed(const FaceCoordInverter& inv, const PolyhedralDomain& d, const Vec2& target) {
    const int scan = 33;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<std::pair<Vec2, double>> candidates;
    candidates.reserve(static_cast<std::size_t>(scan) * scan);
    for (int gy = 0; gy < scan; ++gy) {
        for (int gx = 0; gx < scan; ++gx) {
            Vec2 xy(static_cast<double>(gx) / (scan - 1), static_cast<double>(gy) / (scan - 1));
            xy = project_to_convex_polygon(inv.chart.polygon, xy);
            const FacePairEval fe = eval_face_pair(inv, xy, false);
            const double f = (fe.c - target).squaredNorm();
            candidates.emplace_back(xy, f);
            best_f = std::min(best_f, f);
        }
    }
    // Among scan points that (almost) reach the target, several may sit on
    // distinct preimage branches; keep the branch the solid weights most.
    const double band = std::max(4.0 * best_f, best_f + 1e-10);
    Vec2 best(0.5, 0.5);
    double best_w = -1.0;
    for (const auto& [xy, f] : candidates) {
        if (f > band) continue;
        const double w = corner_weight(d, inv.corner, inv.chart.to_space(xy));
        if (w > best_w) {
            best_w = w;
            best = xy;
        }
    }
    return best;
}

// Coordinate-space distance minimizer restricted to the polygon boundary:
// coarse scan per edge followed by golden-section refinement.  This realizes
// the clamp semantics for targets outside the image of the face.
Vec2 boundary_argmin(const FaceCoordInverter& inv, const Vec2& target, double* f_out) {
    const std::vector<Vec2>& poly = inv.chart.polygon;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double best_f = std::numeric_limits<double>::infinity();
    Vec2 best = poly[0];
    for (std::size_t s = 0; s < poly.size(); ++s) {
        const Vec2& a = poly[s];
        const Vec2& b = poly[(s + 1) % poly.size()];
        auto f_at = [&](double t) {
            return (eval_face_pair(inv, a + t * (b - a), false).c - target).squaredNorm();
        };
        const int coarse = 64;
        int best_i = 0;
        double best_coarse = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= coarse; ++i) {
            const double f = f_at(static_cast<double>(i) / coarse);
            if (f < best_coarse) {
                best_coarse = f;
                best_i = i;
            }
        }
        double lo = std::max(0.0, (best_i - 1.0) / coarse);
        double hi = std::min(1.0, (best_i + 1.0) / coarse);
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = f_at(x1);
        double f2 = f_at(x2);
        for (int iter = 0; iter < 80 && hi - lo > 1e-14; ++iter) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f_at(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f_at(x2);
            }
        }
        const double t = 0.5 * (lo + hi);
        const double f = f_at(t);
        if (f < best_f) {
            best_f = f;
            best = a + t * (b - a);
        }
    }
    if (f_out != nullptr) *f_out = best_f;
    return best;
}

}  // namespace

Vec2 FaceChart::to_chart(const Vec3& q) const {
    const Vec3 rel = q - origin;
    return Vec2(rel.dot(e1) / width, rel.dot(e2) / height);
}

Vec3 FaceChart::to_space(const Vec2& st) const {
    return origin + st.x() * width * e1 + st.y() * height * e2;
}

int PolyhedralDomain::face_of_role(int l, FaceRole role) const {
    const CornerFrame& fr = frames.at(static_cast<std::size_t>(l));
    switch (role) {
        case FaceRole::top: return fr.top;
        case FaceRole::lft: return fr.lft;
        case FaceRole::rgt: return fr.rgt;
    }
    throw ArgumentError("unknown face role");
}

bool PolyhedralDomain::face_contains(int f, int c) const {
    const std::vector<int>& cyc = faces.at(static_cast<std::size_t>(f));
    return std::find(cyc.begin(), cyc.end(), c) != cyc.end();
}

int PolyhedralDomain::edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e][0] == a && edges[e][1] == b) return static_cast<int>(e);
    }
    return -1;
}

const std::array<int, 2>& PolyhedralDomain::adjacent_faces_of_edge(int e) const {
    return edge_faces.at(static_cast<std::size_t>(e));
}

bool PolyhedralDomain::contains(const Vec3& p, double tol) const {
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (face_normals[f].dot(p) - face_offsets[f] > tol) return false;
    }
    return true;
}

Vec3 PolyhedralDomain::face_barycenter(int f) const {
    const std::vector<int>& cyc = faces.at(static_cast<std::size_t>(f));
    Vec3 sum = Vec3::Zero();
    for (int c : cyc) sum += corners[static_cast<std::size_t>(c)];
    return sum / static_cast<double>(cyc.size());
}

Vec3 PolyhedralDomain::body_barycenter() const {
    Vec3 sum = Vec3::Zero();
    for (const Vec3& c : corners) sum += c;
    return sum / static_cast<double>(corners.size());
}

double PolyhedralDomain::volume() const {
    const Vec3 o = body_barycenter();
    double vol = 0.0;
    for (const std::vector<int>& cyc : faces) {
        for (std::size_t s = 1; s + 1 < cyc.size(); ++s) {
            const Vec3 a = corners[cyc[0]] - o;
            const Vec3 b = corners[cyc[s]] - o;
            const Vec3 c = corners[cyc[s + 1]] - o;
            vol += a.dot(b.cross(c)) / 6.0;
        }
    }
    return vol;
}

double PolyhedralDomain::bbox_diagonal() const {
    Vec3 lo = corners.front();
    Vec3 hi = corners.front();
    for (const Vec3& c : corners) {
        lo = lo.cwiseMin(c);
        hi = hi.cwiseMax(c);
    }
    return (hi - lo).norm();
}

FaceChart face_chart(const PolyhedralDomain& d, int f) {
    const std::vector<int>& cyc = d.faces.at(static_cast<std::size_t>(f));
    FaceChart chart;
    const Vec3 base = d.corners[cyc[0]];
    chart.e1 = (d.corners[cyc[1]] - base).normalized();
    chart.e2 = d.face_normals[f].cross(chart.e1);
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    std::vector<Vec2> raw(cyc.size());
    for (std::size_t s = 0; s < cyc.size(); ++s) {
        const Vec3 rel = d.corners[cyc[s]] - base;
        raw[s] = Vec2(rel.dot(chart.e1), rel.dot(chart.e2));
        x0 = std::min(x0, raw[s].x());
        x1 = std::max(x1, raw[s].x());
        y0 = std::min(y0, raw[s].y());
        y1 = std::max(y1, raw[s].y());
    }
    chart.width = x1 - x0;
    chart.height = y1 - y0;
    if (chart.width <= 0.0 || chart.height <= 0.0) {
        throw ArgumentError("degenerate face: zero-area bounding box");
    }
    chart.origin = base + x0 * chart.e1 + y0 * chart.e2;
    chart.polygon.resize(cyc.size());
    for (std::size_t s = 0; s < cyc.size(); ++s) {
        chart.polygon[s] = Vec2((raw[s].x() - x0) / chart.width, (raw[s].y() - y0) / chart.height);
    }
    return chart;
}

namespace {

void build_frames(PolyhedralDomain& d, int ring_m) {
    const int n = static_cast<int>(d.corners.size());
    d.frames.resize(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        CornerFrame fr;
        if (ring_m > 0) {
            const int m = ring_m;
            if (l < m) {  // bottom ring: (u, v, w) = (next, previous, up)
                fr.j = (l + 1) % m;
                fr.k = (l + m - 1) % m;
                fr.i = l + m;
            } else {  // top ring: (u, v, w) = (previous, next, down)
                const int s = l - m;
                fr.j = m + (s + m - 1) % m;
                fr.k = m + (s + 1) % m;
                fr.i = s;
            }
        } else {
            std::vector<int> others;
            for (int c = 0; c < n; ++c) {
                if (c != l && d.edge_index(l, c) >= 0) others.push_back(c);
            }
            if (others.size() != 3) {
                throw ArgumentError("corner without exactly three neighbors");
            }
            fr.j = others[0];
            fr.k = others[1];
            fr.i = others[2];
        }
        const Vec3 ej = d.corners[fr.j] - d.corners[l];
        const Vec3 ek = d.corners[fr.k] - d.corners[l];
        const Vec3 ei = d.corners[fr.i] - d.corners[l];
        if (ej.dot(ek.cross(ei)) < 0.0) std::swap(fr.k, fr.i);
        {
            const Vec3 a = d.corners[fr.j] - d.corners[l];
            const Vec3 b = d.corners[fr.k] - d.corners[l];
            const Vec3 c = d.corners[fr.i] - d.corners[l];
            if (a.dot(b.cross(c)) <= 0.0) {
                throw NumericError("corner frame is not right-handed");
            }
        }
        auto find_face = [&](int a, int b, int c) {
            int found = -1;
            for (std::size_t f = 0; f < d.faces.size(); ++f) {
                if (d.face_contains(static_cast<int>(f), a) && d.face_contains(static_cast<int>(f), b) &&
                    d.face_contains(static_cast<int>(f), c)) {
                    if (found >= 0) throw ArgumentError("corner triple shared by two faces");
                    found = static_cast<int>(f);
                }
            }
            if (found < 0) throw ArgumentError("no face spans a corner and two of its neighbors");
            return found;
        };
        fr.top = find_face(l, fr.j, fr.k);
        fr.lft = find_face(l, fr.j, fr.i);
        fr.rgt = find_face(l, fr.k, fr.i);
        if (fr.top == fr.lft || fr.top == fr.rgt || fr.lft == fr.rgt) {
            throw ArgumentError("corner role faces are not distinct");
        }
        d.frames[static_cast<std::size_t>(l)] = fr;
    }
}

void build_inverters(PolyhedralDomain& d) {
    const int n = static_cast<int>(d.corners.size());
    d.inverters.resize(static_cast<std::size_t>(3 * n));
    for (int l = 0; l < n; ++l) {
        const CornerFrame& fr = d.frames[static_cast<std::size_t>(l)];
        for (int r = 0; r < 3; ++r) {
            const FaceRole role = static_cast<FaceRole>(r);
            FaceCoordInverter inv;
            inv.corner = l;
            inv.role = role;
            inv.face = d.face_of_role(l, role);
            inv.chart = face_chart(d, inv.face);
            inv.corner_pos = d.corners[static_cast<std::size_t>(l)];
            // Coordinate planes are the supporting planes of the two other
            // role faces, taken with inward normals; the distance corner is
            // the axis neighbor not on that plane.
            const Vec3 n_rgt = -d.face_normals[static_cast<std::size_t>(fr.rgt)];
            const Vec3 n_lft = -d.face_normals[static_cast<std::size_t>(fr.lft)];
            const Vec3 n_top = -d.face_normals[static_cast<std::size_t>(fr.top)];
            const Vec3 cj = d.corners[static_cast<std::size_t>(fr.j)];
            const Vec3 ck = d.corners[static_cast<std::size_t>(fr.k)];
            const Vec3 ci = d.corners[static_cast<std::size_t>(fr.i)];
            switch (role) {
                case FaceRole::top:  // (u, v)
                    inv.plane_n1 = n_rgt;
                    inv.opp1 = cj;
                    inv.plane_n2 = n_lft;
                    inv.opp2 = ck;
                    inv.corner_a1 = cj;
                    inv.corner_b1 = ck;
                    break;
                case FaceRole::lft:  // (u, w)
                    inv.plane_n1 = n_rgt;
                    inv.opp1 = cj;
                    inv.plane_n2 = n_top;
                    inv.opp2 = ci;
                    inv.corner_a1 = cj;
                    inv.corner_b1 = ci;
                    break;
                case FaceRole::rgt:  // (v, w)
                    inv.plane_n1 = n_lft;
                    inv.opp1 = ck;
                    inv.plane_n2 = n_top;
                    inv.opp2 = ci;
                    inv.corner_a1 = ck;
                    inv.corner_b1 = ci;
                    break;
            }
            if (polygon_signed_area(inv.chart.polygon) <= 0.0) {
                throw NumericError("face chart polygon is not counter-clockwise");
            }
            build_seed_table(inv, d);
            d.inverters[static_cast<std::size_t>(3 * l + r)] = std::move(inv);
        }
    }
}

void finish_domain(PolyhedralDomain& d, int ring_m) {
    // Orient all faces counter-clockwise as seen from outside.
    const Vec3 center = d.body_barycenter();
    for (std::vector<int>& cyc : d.faces) {
        Vec3 n = newell_normal(d.corners, cyc);
        Vec3 fc = Vec3::Zero();
        for (int c : cyc) fc += d.corners[static_cast<std::size_t>(c)];
        fc /= static_cast<double>(cyc.size());
        if (n.dot(fc - center) < 0.0) {
            std::reverse(cyc.begin(), cyc.end());
            n = -n;
        }
        if (n.dot(fc - center) <= 0.0) {
            throw NumericError("face orientation could not be fixed");
        }
    }
    d.face_normals.resize(d.faces.size());
    d.face_offsets.resize(d.faces.size());
    for (std::size_t f = 0; f < d.faces.size(); ++f) {
        const Vec3 n = newell_normal(d.corners, d.faces[f]).normalized();
        d.face_normals[f] = n;
        d.face_offsets[f] = n.dot(d.corners[static_cast<std::size_t>(d.faces[f][0])]);
        for (int c : d.faces[f]) {
            if (std::abs(n.dot(d.corners[static_cast<std::size_t>(c)]) - d.face_offsets[f]) > 1e-12) {
                throw NumericError("face is not planar");
            }
        }
    }
    // Edge list: sorted pairs from face cycles, lexicographic order.
    d.edges.clear();
    for (const std::vector<int>& cyc : d.faces) {
        for (std::size_t s = 0; s < cyc.size(); ++s) {
            int a = cyc[s];
            int b = cyc[(s + 1) % cyc.size()];
            if (a > b) std::swap(a, b);
            d.edges.push_back({a, b});
        }
    }
    std::sort(d.edges.begin(), d.edges.end());
    d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
    d.edge_faces.resize(d.edges.size());
    for (std::size_t e = 0; e < d.edges.size(); ++e) {
        std::vector<int> adj;
        for (std::size_t f = 0; f < d.faces.size(); ++f) {
            if (d.face_contains(static_cast<int>(f), d.edges[e][0]) &&
                d.face_contains(static_cast<int>(f), d.edges[e][1])) {
                adj.push_back(static_cast<int>(f));
            }
        }
        if (adj.size() != 2) throw ArgumentError("edge not shared by exactly two faces");
        d.edge_faces[e] = {adj[0], adj[1]};
    }
    build_frames(d, ring_m);
    build_inverters(d);
}

}  // namespace

PolyhedralDomain build_domain(const std::string& shape) {
    PolyhedralDomain d;
    d.shape = shape;
    if (shape == "tetrahedron") {
        const double s = 1.0 / (2.0 * std::sqrt(2.0));
        d.corners = {Vec3(1, 1, 1) * s, Vec3(1, -1, -1) * s, Vec3(-1, 1, -1) * s, Vec3(-1, -1, 1) * s};
        d.faces = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
        finish_domain(d, 0);
    } else if (shape == "triangular_prism" || shape == "hexahedron" || shape == "pentagonal_prism") {
        RingSpec ring;
        if (shape == "triangular_prism") {
            ring.m = 3;
            ring.radius = 1.0 / std::sqrt(3.0);
        } else if (shape == "hexahedron") {
            ring.m = 4;
            ring.radius = std::sqrt(0.5);
        } else {
            ring.m = 5;
            ring.radius = 0.5 / std::sin(kPi / 5.0);
        }
        d.corners = ring_corners(ring);
        if (shape == "hexahedron") {
            // Snap the square ring to exact +/-  1/2 coordinates.
            for (Vec3& c : d.corners) {
                c.x() = c.x() > 0.0 ? 0.5 : -0.5;
                c.y() = c.y() > 0.0 ? 0.5 : -0.5;
            }
        }
        d.faces = ring_faces(ring.m);
        finish_domain(d, ring.m);
    } else {
        throw ArgumentError("unknown domain shape: " + shape +
                            " (expected tetrahedron, triangular_prism, hexahedron, or pentagonal_prism)");
    }
    return d;
}

CornerCoordinates corner_coordinates(const PolyhedralDomain& d, int l, const Vec3& p) {
    if (l < 0 || static_cast<std::size_t>(l) >= d.corners.size()) {
        throw ArgumentError("corner index out of range");
    }
    if (!d.contains(p, 1e-9)) {
        std::ostringstream oss;
        oss << "point (" << p.x() << ", " << p.y() << ", " << p.z() << ") lies outside the domain";
        throw DomainError(oss.str());
    }
    const CornerFrame& fr = d.frames[static_cast<std::size_t>(l)];
    const Vec3& cl = d.corners[static_cast<std::size_t>(l)];
    auto coord = [&](int plane_face, int opp_corner) {
        double dp = (-d.face_normals[static_cast<std::size_t>(plane_face)]).dot(p - cl);
        if (dp < 0.0) dp = 0.0;
        const double dc = (p - d.corners[static_cast<std::size_t>(opp_corner)]).norm();
        const double denom = dp + dc;
        if (denom < 1e-300) {
            throw NumericError("corner coordinate undefined: degenerate configuration");
        }
        double c = dp / denom;
        if (c < kCoordSnap) c = 0.0;
        return c;
    };
    CornerCoordinates out;
    out.u = coord(fr.rgt, fr.j);
    out.v = coord(fr.lft, fr.k);
    out.w = coord(fr.top, fr.i);
    return out;
}

std::vector<double> corner_weights(const PolyhedralDomain& d, const Vec3& p) {
    if (!d.contains(p, 1e-9)) {
        throw DomainError("point lies outside the domain");
    }
    const std::size_t n = d.corners.size();
    std::vector<double> products(n, 1.0);
    std::vector<double> dist2(d.faces.size());
    for (std::size_t f = 0; f < d.faces.size(); ++f) {
        const double dist = std::abs(d.face_normals[f].dot(p) - d.face_offsets[f]);
        dist2[f] = dist * dist;
    }
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t f = 0; f < d.faces.size(); ++f) {
            if (!d.face_contains(static_cast<int>(f), static_cast<int>(l))) {
                products[l] *= dist2[f];
            }
        }
    }
    double sum = 0.0;
    for (double w : products) sum += w;
    if (!(sum > 1e-300)) {
        throw NumericError("corner weights vanished: all face-distance products are zero");
    }
    for (double& w : products) w /= sum;
    return products;
}

double corner_weight(const PolyhedralDomain& d, int l, const Vec3& p) {
    if (l < 0 || static_cast<std::size_t>(l) >= d.corners.size()) {
        throw ArgumentError("corner index out of range");
    }
    return corner_weights(d, p)[static_cast<std::size_t>(l)];
}

Vec3 invert_face_coordinates(const PolyhedralDomain& d, int l, FaceRole role, double a, double b) {
    if (l < 0 || static_cast<std::size_t>(l) >= d.corners.size()) {
        throw ArgumentError("corner index out of range");
    }
    if (a < -1e-9 || a > 1.0 + 1e-9 || b < -1e-9 || b > 1.0 + 1e-9) {
        throw DomainError("face coordinates outside the unit square");
    }
    a = std::clamp(a, 0.0, 1.0);
    b = std::clamp(b, 0.0, 1.0);
    const FaceCoordInverter& inv = d.inverters[static_cast<std::size_t>(3 * l + static_cast<int>(role))];
    if (a == 0.0 && b == 0.0) return d.corners[static_cast<std::size_t>(l)];
    if (a == 1.0 && b == 0.0) return inv.corner_a1;
    if (a == 0.0 && b == 1.0) return inv.corner_b1;

    const Vec2 target(a, b);
    const int res = inv.seed_res;
    const int ia = std::clamp(static_cast<int>(std::lround(a * (res - 1))), 0, res - 1);
    const int ib = std::clamp(static_cast<int>(std::lround(b * (res - 1))), 0, res - 1);
    const Vec2 seed = inv.seeds[static_cast<std::size_t>(ib) * res + ia];

    LmOutcome lm = run_lm(inv, target, seed, 60);
    if (!lm.converged) {
        lm = run_lm(inv, target, grid_rescan_seed(inv, d, target), 80);
    }
    if (lm.converged) {
        // The pair map folds on pentagonal faces, so the target can have
        // several preimages.  If a neighboring seed carries clearly more
        // corner weight, try it too and keep the dominant convergent branch.
        double w_here = corner_weight(d, l, inv.chart.to_space(lm.xy));
        Vec2 best_xy = lm.xy;
        const int neighbor_buckets[4][2] = {{ia + 1, ib}, {ia - 1, ib}, {ia, ib + 1}, {ia, ib - 1}};
        for (const auto& nbk : neighbor_buckets) {
            const int na = nbk[0], nb = nbk[1];
            if (na < 0 || na >= res || nb < 0 || nb >= res) continue;
            const Vec2 alt_seed = inv.seeds[static_cast<std::size_t>(nb) * res + na];
            if ((alt_seed - best_xy).norm() < 1e-6) continue;
            if (corner_weight(d, l, inv.chart.to_space(alt_seed)) <= kBranchDominance * w_here) continue;
            const LmOutcome alt = run_lm(inv, target, alt_seed, 60);
            if (!alt.converged) continue;
            const double w_alt = corner_weight(d, l, inv.chart.to_space(alt.xy));
            if (w_alt > kBranchDominance * w_here) {
                w_here = w_alt;
                best_xy = alt.xy;
            }
        }
        return inv.chart.to_space(best_xy);
    }
    // The target may lie outside the image of the face; the result is then the
    // face point with nearest coordinates.  That point can sit on the face
    // polygon's boundary, or — where the pair map folds or pinches — on an
    // interior envelope at which the constrained iteration stalls at a
    // stationary point of the coordinate distance.  Keep the closer candidate.
    // Both distances below are squared coordinate-space norms.
    double d2_boundary = 0.0;
    const Vec2 xb = boundary_argmin(inv, target, &d2_boundary);
    const double d2_lm = lm.residual.squaredNorm();
    if (d2_boundary <= d2_lm * (1.0 + 1e-9) + 1e-15) {
        return inv.chart.to_space(xb);
    }
    if (std::isfinite(d2_lm)) {
        // The iteration keeps its iterates inside the face polygon, so the
        // stall is a valid face point.  Accept it when it is stationary (an
        // interior envelope) or pinned against the polygon boundary (a
        // constrained minimum the boundary scan undersolved).
        const FacePairEval stall = eval_face_pair(inv, lm.xy, true);
        const Vec2 grad = stall.jac.transpose() * Vec2(stall.c - target);
        const double edge_dist = polygon_boundary_distance(inv.chart.polygon, lm.xy);
        if (grad.norm() <= 1e-6 || edge_dist <= 1e-9) {
            return inv.chart.to_space(lm.xy);
        }
    }
    // An interior stall with a usable descent direction means the iteration
    // itself failed on a target that has a true preimage.
    std::ostringstream oss;
    oss << "face coordinate inversion did not converge for corner " << l << " role "
        << static_cast<int>(role) << " target (" << a << ", " << b << "); residual ("
        << lm.residual.x() << ", " << lm.residual.y() << ")";
    throw NumericError(oss.str());
}

}  // namespace gregsolid
