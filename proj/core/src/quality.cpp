#include "gregsolid/quality.hpp"

#include <algorithm>
#include <cmath>

#include "gregsolid/parallel.hpp"

namespace gregsolid {

namespace {

constexpr double kEdgeFloor = 1e-14;

}  // namespace

double scaled_jacobian(const std::array<Vec3, 8>& cell, int h, bool* degenerate) {
    const auto& nb = hex_corner_neighbors[static_cast<std::size_t>(h)];
    const Vec3 a = cell[static_cast<std::size_t>(nb[0])] - cell[static_cast<std::size_t>(h)];
    const Vec3 b = cell[static_cast<std::size_t>(nb[1])] - cell[static_cast<std::size_t>(h)];
    const Vec3 c = cell[static_cast<std::size_t>(nb[2])] - cell[static_cast<std::size_t>(h)];
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    if (la < kEdgeFloor || lb < kEdgeFloor || lc < kEdgeFloor) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    if (degenerate) *degenerate = false;
    return (a / la).dot((b / lb).cross(c / lc));
}

std::array<std::pair<int, Vec3>, 4> scaled_jacobian_gradient(
    const std::array<Vec3, 8>& cell, int h) {
    const auto& nb = hex_corner_neighbors[static_cast<std::size_t>(h)];
    std::array<std::pair<int, Vec3>, 4> out{
        std::pair<int, Vec3>{nb[0], Vec3::Zero()},
        std::pair<int, Vec3>{nb[1], Vec3::Zero()},
        std::pair<int, Vec3>{nb[2], Vec3::Zero()},
        std::pair<int, Vec3>{h, Vec3::Zero()}};
    const Vec3 a = cell[static_cast<std::size_t>(nb[0])] - cell[static_cast<std::size_t>(h)];
    const Vec3 b = cell[static_cast<std::size_t>(nb[1])] - cell[static_cast<std::size_t>(h)];
    const Vec3 c = cell[static_cast<std::size_t>(nb[2])] - cell[static_cast<std::size_t>(h)];
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    if (la < kEdgeFloor || lb < kEdgeFloor || lc < kEdgeFloor) return out;
    const Vec3 ah = a / la, bh = b / lb, ch = c / lc;
    const double j = ah.dot(bh.cross(ch));
    // d/da of (a/|a|) . d for constant d: (d - ah (ah . d)) / |a|, and the
    // triple product is cyclic in (a, b, c).
    out[0].second = (bh.cross(ch) - j * ah) / la;
    out[1].second = (ch.cross(ah) - j * bh) / lb;
    out[2].second = (ah.cross(bh) - j * ch) / lc;
    out[3].second = -(out[0].second + out[1].second + out[2].second);
    return out;
}

JacobianVector jacobian_vector(const HexGrid& mesh) {
    JacobianVector jv;
    const std::size_t n_cells = mesh.cells.size();
    jv.values.assign(8 * n_cells, 0.0);
    jv.positive.assign(8 * n_cells, 0.0);
    jv.negative.assign(8 * n_cells, 0.0);
    jv.degenerate_cells.assign(n_cells, false);
    parallel_for(n_cells, [&](std::size_t ci) {
        std::array<Vec3, 8> cell;
        for (int k = 0; k < 8; ++k)
            cell[static_cast<std::size_t>(k)] =
                mesh.vertices[static_cast<std::size_t>(mesh.cells[ci][static_cast<std::size_t>(k)])];
        bool cell_degenerate = false;
        for (int h = 0; h < 8; ++h) {
            bool corner_degenerate = false;
            const double j = scaled_jacobian(cell, h, &corner_degenerate);
            cell_degenerate = cell_degenerate || corner_degenerate;
            const std::size_t k = 8 * ci + static_cast<std::size_t>(h);
            jv.values[k] = j;
            jv.positive[k] = j > 0.0 ? j : 0.0;
            jv.negative[k] = j < 0.0 ? j : 0.0;
        }
        jv.degenerate_cells[ci] = cell_degenerate;
    });
    return jv;
}

SparseNorms e_sparse(const JacobianVector& jv) {
    SparseNorms out;
    for (const double n : jv.negative) {
        if (n < 0.0) {
            ++out.l0;
            out.l1 -= n;
        }
    }
    return out;
}

double e_positive(const JacobianVector& jv, double eps) {
    if (!(eps > 0.0)) throw ArgumentError("positivity energy: eps must be positive");
    double sum = 0.0;
    for (const double j : jv.values)
        if (j >= 0.0) sum += 1.0 / (j + eps);
    return sum;
}

double e_smooth(const HexGrid& mesh) {
    double sum = 0.0;
    for (std::size_t n = 0; n < mesh.vertices.size(); ++n) {
        if (mesh.on_boundary[n]) continue;
        const std::vector<int>& nb = mesh.neighbors[n];
        if (nb.empty()) continue;
        Vec3 diff = Vec3::Zero();
        for (const int m : nb)
            diff += mesh.vertices[static_cast<std::size_t>(m)] - mesh.vertices[n];
        sum += diff.squaredNorm() / (static_cast<double>(nb.size()) * static_cast<double>(nb.size()));
    }
    return sum;
}

ObjectiveBreakdown objective(const HexGrid& mesh, double mu, double nu, double eps,
                             SparseNorm norm) {
    if (mu < 0.0 || nu < 0.0)
        throw ArgumentError("objective: weights must be non-negative");
    const JacobianVector jv = jacobian_vector(mesh);
    const SparseNorms sp = e_sparse(jv);
    ObjectiveBreakdown out;
    out.smooth = e_smooth(mesh);
    out.positive = e_positive(jv, eps);
    out.sparse = norm == SparseNorm::l0 ? static_cast<double>(sp.l0) : sp.l1;
    out.total = out.smooth + mu * out.positive + nu * out.sparse;
    return out;
}

double negative_volume_ratio(const HexGrid& mesh, const JacobianVector& jv) {
    double total = 0.0;
    double negative = 0.0;
    for (std::size_t ci = 0; ci < mesh.cells.size(); ++ci) {
        std::array<Vec3, 8> cell;
        for (int k = 0; k < 8; ++k)
            cell[static_cast<std::size_t>(k)] =
                mesh.vertices[static_cast<std::size_t>(mesh.cells[ci][static_cast<std::size_t>(k)])];
        const double vol = std::abs(hex_volume(cell));
        total += vol;
        bool has_negative = false;
        for (int h = 0; h < 8 && !has_negative; ++h)
            has_negative = jv.negative[8 * ci + static_cast<std::size_t>(h)] < 0.0;
        if (has_negative) negative += vol;
    }
    if (total <= 0.0) return 0.0;
    const double ratio = negative / total;
    return std::clamp(ratio, 0.0, 1.0);
}

QualityReport make_quality_report(const HexGrid& mesh, const JacobianVector& jv,
                                  double seconds) {
    QualityReport r;
    r.resolution = mesh.resolution;
    r.seconds = seconds;
    if (jv.values.empty()) return r;
    double sum = 0.0;
    r.min_j = jv.values.front();
    r.max_j = jv.values.front();
    for (const double j : jv.values) {
        sum += j;
        r.min_j = std::min(r.min_j, j);
        r.max_j = std::max(r.max_j, j);
    }
    r.avg_j = sum / static_cast<double>(jv.values.size());
    r.neg_ratio = negative_volume_ratio(mesh, jv);
    return r;
}

}  // namespace gregsolid
