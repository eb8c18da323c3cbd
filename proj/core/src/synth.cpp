#include "gregsolid/synth.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace gregsolid {

namespace {

/// Degree-1 tensor patch reproducing a quadrilateral face exactly.
PatchDescriptor identity_quad(const PolyhedralDomain& d, int f) {
    const std::vector<int>& cyc = d.faces[static_cast<std::size_t>(f)];
    PatchDescriptor pd;
    pd.kind = PatchKind::tensor_spline;
    pd.face_corners = {cyc[0], cyc[1], cyc[2], cyc[3]};
    pd.spline.basis_u = KnotVector::clamped_uniform(1, 2);
    pd.spline.basis_v = KnotVector::clamped_uniform(1, 2);
    const auto pos = [&](int c) { return d.corners[static_cast<std::size_t>(c)]; };
    pd.spline.control = {{pos(cyc[0]), pos(cyc[3])}, {pos(cyc[1]), pos(cyc[2])}};
    return pd;
}

/// Structured face-chart sampling of a deformation map.
PatchDescriptor sampled_map(const PolyhedralDomain& d, int f, int nu, int nv,
                            const std::function<Vec3(const Vec3&)>& map) {
    const FaceChart chart = face_chart(d, f);
    PatchDescriptor pd;
    pd.kind = PatchKind::sampled_grid;
    pd.params_u.resize(static_cast<std::size_t>(nu));
    pd.params_v.resize(static_cast<std::size_t>(nv));
    for (int i = 0; i < nu; ++i)
        pd.params_u[static_cast<std::size_t>(i)] = static_cast<double>(i) / (nu - 1);
    for (int j = 0; j < nv; ++j)
        pd.params_v[static_cast<std::size_t>(j)] = static_cast<double>(j) / (nv - 1);
    pd.points.assign(static_cast<std::size_t>(nu),
                     std::vector<Vec3>(static_cast<std::size_t>(nv)));
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            pd.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                map(chart.to_space(Vec2(pd.params_u[static_cast<std::size_t>(i)],
                                        pd.params_v[static_cast<std::size_t>(j)])));
    return pd;
}

SynthModel synth_cube() {
    SynthModel m;
    m.name = "cube";
    m.domain_shape = "hexahedron";
    const PolyhedralDomain d = build_domain(m.domain_shape);
    for (int f = 0; f < static_cast<int>(d.faces.size()); ++f)
        m.patches.push_back(identity_quad(d, f));
    return m;
}

SynthModel synth_twisted_prism(double magnitude) {
    SynthModel m;
    m.name = "twisted_prism";
    m.domain_shape = "triangular_prism";
    const PolyhedralDomain d = build_domain(m.domain_shape);
    const auto twist = [magnitude](const Vec3& q) {
        const double theta = magnitude * (q.z() + 0.5);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        return Vec3(c * q.x() - s * q.y(), s * q.x() + c * q.y(), q.z());
    };
    for (int f = 0; f < static_cast<int>(d.faces.size()); ++f) {
        const bool cap = std::abs(d.face_normals[static_cast<std::size_t>(f)].z()) > 0.5;
        // Caps see a rigid rotation (affine), so 2x2 sampling is exact; the
        // helical side walls need a dense grid.
        m.patches.push_back(cap ? sampled_map(d, f, 2, 2, twist)
                                : sampled_map(d, f, 33, 33, twist));
    }
    return m;
}

SynthModel synth_bulged_pentaprism(double magnitude) {
    SynthModel m;
    m.name = "bulged_pentaprism";
    m.domain_shape = "pentagonal_prism";
    const PolyhedralDomain d = build_domain(m.domain_shape);
    const double r0 = 0.5;  // bump support radius, inside the cap's inradius
    const auto bump = [magnitude, r0](const Vec3& q) {
        const double r = std::hypot(q.x(), q.y());
        if (r >= r0) return q;
        const double c = std::cos(std::numbers::pi * r / (2.0 * r0));
        return Vec3(q.x(), q.y(), q.z() + magnitude * c * c);
    };
    const auto ident = [](const Vec3& q) { return q; };
    for (int f = 0; f < static_cast<int>(d.faces.size()); ++f) {
        const double nz = d.face_normals[static_cast<std::size_t>(f)].z();
        if (nz > 0.5)
            m.patches.push_back(sampled_map(d, f, 65, 65, bump));
        else if (nz < -0.5)
            m.patches.push_back(sampled_map(d, f, 65, 65, ident));
        else
            m.patches.push_back(identity_quad(d, f));
    }
    return m;
}

}  // namespace

SynthModel synth_model(const std::string& kind, double magnitude) {
    if (magnitude < 0.0)
        throw ArgumentError("synth_model: magnitude must be non-negative");
    if (kind == "cube") return synth_cube();
    if (kind == "twisted_prism") return synth_twisted_prism(magnitude);
    if (kind == "bulged_pentaprism") return synth_bulged_pentaprism(magnitude);
    std::ostringstream os;
    os << "synth_model: unknown kind '" << kind
       << "' (expected cube, twisted_prism, or bulged_pentaprism)";
    throw ArgumentError(os.str());
}

}  // namespace gregsolid
