#include "gregsolid/grid.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

namespace gregsolid {

const std::array<Vec3, 8> hex_corner_offsets = {
    Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0),
    Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1), Vec3(0, 1, 1)};

const std::array<std::array<int, 3>, 8> hex_corner_neighbors = {{{1, 3, 4},
                                                                 {2, 0, 5},
                                                                 {3, 1, 6},
                                                                 {0, 2, 7},
                                                                 {7, 5, 0},
                                                                 {4, 6, 1},
                                                                 {5, 7, 2},
                                                                 {6, 4, 3}}};

const std::array<std::array<int, 2>, 12> hex_edge_list = {{{0, 1},
                                                           {1, 2},
                                                           {2, 3},
                                                           {3, 0},
                                                           {4, 5},
                                                           {5, 6},
                                                           {6, 7},
                                                           {7, 4},
                                                           {0, 4},
                                                           {1, 5},
                                                           {2, 6},
                                                           {3, 7}}};

const std::array<std::array<int, 4>, 6> hex_tet_split = {{{0, 1, 2, 6},
                                                          {0, 2, 3, 6},
                                                          {0, 3, 7, 6},
                                                          {0, 7, 4, 6},
                                                          {0, 4, 5, 6},
                                                          {0, 5, 1, 6}}};

namespace {

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

double hex_volume(const std::array<Vec3, 8>& cell) {
    double vol = 0.0;
    for (const auto& tet : hex_tet_split) {
        vol += tet_volume(cell[tet[0]], cell[tet[1]], cell[tet[2]], cell[tet[3]]);
    }
    return vol;
}

bool hex_contains(const std::array<Vec3, 8>& cell, const Vec3& p, double tol) {
    for (const auto& tet : hex_tet_split) {
        const Vec3& a = cell[tet[0]];
        const Vec3& b = cell[tet[1]];
        const Vec3& c = cell[tet[2]];
        const Vec3& d = cell[tet[3]];
        const double v = tet_volume(a, b, c, d);
        if (std::abs(v) < 1e-300) continue;
        const double sign = v > 0.0 ? 1.0 : -1.0;
        const double slack = tol * std::abs(v);
        if (sign * tet_volume(p, b, c, d) < -slack) continue;
        if (sign * tet_volume(a, p, c, d) < -slack) continue;
        if (sign * tet_volume(a, b, p, d) < -slack) continue;
        if (sign * tet_volume(a, b, c, p) < -slack) continue;
        return true;
    }
    return false;
}

namespace {

Vec3 bilinear(const Vec3& w00, const Vec3& w10, const Vec3& w01, const Vec3& w11, double s, double t) {
    return (1.0 - s) * (1.0 - t) * w00 + s * (1.0 - t) * w10 + (1.0 - s) * t * w01 + s * t * w11;
}

class GridBuilder {
  public:
    GridBuilder(const PolyhedralDomain& d, int M, int N, int L) : d_(d), m_(M), n_(N), l_(L) {}

    HexGrid build() {
        validate_face_counts();
        create_anchors();
        for (std::size_t l = 0; l < d_.corners.size(); ++l) {
            build_block(static_cast<int>(l));
        }
        HexGrid grid;
        grid.vertices = std::move(vertices_);
        grid.on_boundary = std::move(on_boundary_);
        grid.resolution = {m_, n_, l_};
        grid.blocks = std::move(blocks_);
        collect_cells(grid);
        collect_neighbors(grid);
        return grid;
    }

  private:
    void validate_face_counts() {
        if (m_ < 1 || n_ < 1 || l_ < 1) {
            throw ArgumentError("grid resolution must be at least 1 in every direction");
        }
        face_count_.assign(d_.faces.size(), -1);
        auto assign = [&](int face, int count) {
            int& slot = face_count_[static_cast<std::size_t>(face)];
            if (slot < 0) {
                slot = count;
            } else if (slot != count) {
                std::ostringstream oss;
                oss << "grid resolution " << m_ << "x" << n_ << "x" << l_
                    << " conflicts with the face structure of shape '" << d_.shape
                    << "': face " << face << " would need both " << slot << " and " << count
                    << " subdivisions; use equal counts in the conflicting directions";
                throw ArgumentError(oss.str());
            }
        };
        for (std::size_t l = 0; l < d_.corners.size(); ++l) {
            const CornerFrame& fr = d_.frames[l];
            assign(fr.rgt, m_);
            assign(fr.lft, n_);
            assign(fr.top, l_);
        }
    }

    int new_vertex(const Vec3& p, bool boundary) {
        vertices_.push_back(p);
        on_boundary_.push_back(boundary);
        return static_cast<int>(vertices_.size()) - 1;
    }

    void create_anchors() {
        corner_anchor_.resize(d_.corners.size());
        for (std::size_t c = 0; c < d_.corners.size(); ++c) {
            corner_anchor_[c] = new_vertex(d_.corners[c], true);
        }
        edgemid_anchor_.resize(d_.edges.size());
        for (std::size_t e = 0; e < d_.edges.size(); ++e) {
            const Vec3 mid = 0.5 * (d_.corners[d_.edges[e][0]] + d_.corners[d_.edges[e][1]]);
            edgemid_anchor_[e] = new_vertex(mid, true);
        }
        facebary_anchor_.resize(d_.faces.size());
        for (std::size_t f = 0; f < d_.faces.size(); ++f) {
            facebary_anchor_[f] = new_vertex(d_.face_barycenter(static_cast<int>(f)), true);
        }
        body_anchor_ = new_vertex(d_.body_barycenter(), false);
    }

    // Interior vertex ids of the segment between two anchors, ordered from
    // anchor `from` to anchor `to`, with `count` subdivisions.  Created once
    // with positions interpolated from the smaller anchor id.
    std::vector<int> edge_interior(int from, int to, int count) {
        const int lo = std::min(from, to);
        const int hi = std::max(from, to);
        auto [it, inserted] = edge_reg_.try_emplace({lo, hi});
        std::vector<int>& vids = it->second;
        if (inserted) {
            const Vec3 a = vertices_[static_cast<std::size_t>(lo)];
            const Vec3 b = vertices_[static_cast<std::size_t>(hi)];
            const bool boundary =
                on_boundary_[static_cast<std::size_t>(lo)] && on_boundary_[static_cast<std::size_t>(hi)];
            vids.reserve(static_cast<std::size_t>(count - 1));
            for (int i = 1; i < count; ++i) {
                const double t = static_cast<double>(i) / count;
                vids.push_back(new_vertex(a + t * (b - a), boundary));
            }
        }
        if (static_cast<int>(vids.size()) != count - 1) {
            throw Error("internal grid error: inconsistent edge subdivision");
        }
        std::vector<int> ordered(vids);
        if (from != lo) std::reverse(ordered.begin(), ordered.end());
        return ordered;
    }

    // Interior vertex grid of the internal interface quad attached to domain
    // edge e: corners (edge midpoint, barycenter of the lower-index adjacent
    // face, barycenter of the higher-index face, body barycenter).  Row-major
    // (alpha-1)*(n_beta-1)+(beta-1) with alpha toward the lower-index face.
    struct InterfacePatch {
        int f_lo = -1, f_hi = -1;
        int n_alpha = 0, n_beta = 0;
        const std::vector<int>* vids = nullptr;
    };

    InterfacePatch interface_interior(int e) {
        InterfacePatch patch;
        const std::array<int, 2>& adj = d_.adjacent_faces_of_edge(e);
        patch.f_lo = std::min(adj[0], adj[1]);
        patch.f_hi = std::max(adj[0], adj[1]);
        patch.n_alpha = face_count_[static_cast<std::size_t>(patch.f_hi)];
        patch.n_beta = face_count_[static_cast<std::size_t>(patch.f_lo)];
        auto [it, inserted] = face_reg_.try_emplace(e);
        std::vector<int>& vids = it->second;
        if (inserted) {
            const Vec3 m = vertices_[static_cast<std::size_t>(edgemid_anchor_[static_cast<std::size_t>(e)])];
            const Vec3 blo = vertices_[static_cast<std::size_t>(facebary_anchor_[static_cast<std::size_t>(patch.f_lo)])];
            const Vec3 bhi = vertices_[static_cast<std::size_t>(facebary_anchor_[static_cast<std::size_t>(patch.f_hi)])];
            const Vec3 body = vertices_[static_cast<std::size_t>(body_anchor_)];
            vids.reserve(static_cast<std::size_t>(patch.n_alpha - 1) *
                         static_cast<std::size_t>(patch.n_beta - 1));
            for (int alpha = 1; alpha < patch.n_alpha; ++alpha) {
                for (int beta = 1; beta < patch.n_beta; ++beta) {
                    const double s = static_cast<double>(alpha) / patch.n_alpha;
                    const double t = static_cast<double>(beta) / patch.n_beta;
                    vids.push_back(new_vertex(bilinear(m, blo, bhi, body, s, t), false));
                }
            }
        }
        if (static_cast<int>(vids.size()) !=
            (patch.n_alpha - 1) * (patch.n_beta - 1)) {
            throw Error("internal grid error: inconsistent interface subdivision");
        }
        patch.vids = &vids;
        return patch;
    }

    void build_block(int l) {
        const CornerFrame& fr = d_.frames[static_cast<std::size_t>(l)];
        BlockLattice block;
        block.corner = l;
        block.nu = m_;
        block.nv = n_;
        block.nw = l_;
        block.vertex_ids.assign(static_cast<std::size_t>((m_ + 1) * (n_ + 1) * (l_ + 1)), -1);
        auto set_at = [&](int a, int b, int c, int vid) {
            block.vertex_ids[static_cast<std::size_t>((a * (n_ + 1) + b) * (l_ + 1) + c)] = vid;
        };

        const int e_u = d_.edge_index(l, fr.j);
        const int e_v = d_.edge_index(l, fr.k);
        const int e_w = d_.edge_index(l, fr.i);
        const int aC = corner_anchor_[static_cast<std::size_t>(l)];
        const int aU = edgemid_anchor_[static_cast<std::size_t>(e_u)];
        const int aV = edgemid_anchor_[static_cast<std::size_t>(e_v)];
        const int aW = edgemid_anchor_[static_cast<std::size_t>(e_w)];
        const int aTop = facebary_anchor_[static_cast<std::size_t>(fr.top)];
        const int aLft = facebary_anchor_[static_cast<std::size_t>(fr.lft)];
        const int aRgt = facebary_anchor_[static_cast<std::size_t>(fr.rgt)];
        const int aBody = body_anchor_;

        set_at(0, 0, 0, aC);
        set_at(m_, 0, 0, aU);
        set_at(0, n_, 0, aV);
        set_at(0, 0, l_, aW);
        set_at(m_, n_, 0, aTop);
        set_at(m_, 0, l_, aLft);
        set_at(0, n_, l_, aRgt);
        set_at(m_, n_, l_, aBody);

        auto fill_edge = [&](int from, int to, int count, auto place) {
            const std::vector<int> vids = edge_interior(from, to, count);
            for (int i = 1; i < count; ++i) place(i, vids[static_cast<std::size_t>(i - 1)]);
        };
        fill_edge(aC, aU, m_, [&](int i, int v) { set_at(i, 0, 0, v); });
        fill_edge(aV, aTop, m_, [&](int i, int v) { set_at(i, n_, 0, v); });
        fill_edge(aW, aLft, m_, [&](int i, int v) { set_at(i, 0, l_, v); });
        fill_edge(aRgt, aBody, m_, [&](int i, int v) { set_at(i, n_, l_, v); });
        fill_edge(aC, aV, n_, [&](int i, int v) { set_at(0, i, 0, v); });
        fill_edge(aU, aTop, n_, [&](int i, int v) { set_at(m_, i, 0, v); });
        fill_edge(aW, aRgt, n_, [&](int i, int v) { set_at(0, i, l_, v); });
        fill_edge(aLft, aBody, n_, [&](int i, int v) { set_at(m_, i, l_, v); });
        fill_edge(aC, aW, l_, [&](int i, int v) { set_at(0, 0, i, v); });
        fill_edge(aU, aLft, l_, [&](int i, int v) { set_at(m_, 0, i, v); });
        fill_edge(aV, aRgt, l_, [&](int i, int v) { set_at(0, n_, i, v); });
        fill_edge(aTop, aBody, l_, [&](int i, int v) { set_at(m_, n_, i, v); });

        // Block-owned boundary quads on the three domain faces at the corner.
        auto fill_owned_quad = [&](int a00, int a10, int a01, int a11, int ns, int nt, auto place) {
            const Vec3 p00 = vertices_[static_cast<std::size_t>(a00)];
            const Vec3 p10 = vertices_[static_cast<std::size_t>(a10)];
            const Vec3 p01 = vertices_[static_cast<std::size_t>(a01)];
            const Vec3 p11 = vertices_[static_cast<std::size_t>(a11)];
            for (int s = 1; s < ns; ++s) {
                for (int t = 1; t < nt; ++t) {
                    const Vec3 p = bilinear(p00, p10, p01, p11, static_cast<double>(s) / ns,
                                            static_cast<double>(t) / nt);
                    place(s, t, new_vertex(p, true));
                }
            }
        };
        // a = 0 lies on face rgt; b = 0 on lft; c = 0 on top.
        fill_owned_quad(aC, aV, aW, aRgt, n_, l_, [&](int s, int t, int v) { set_at(0, s, t, v); });
        fill_owned_quad(aC, aU, aW, aLft, m_, l_, [&](int s, int t, int v) { set_at(s, 0, t, v); });
        fill_owned_quad(aC, aU, aV, aTop, m_, n_, [&](int s, int t, int v) { set_at(s, t, 0, v); });

        // Shared interface quads toward the block's three axis neighbors.
        auto fill_interface = [&](int e, int face_s, int ns, int nt, auto place) {
            // face_s: the face reached by the local s direction; alpha runs
            // toward the lower-index adjacent face of e.
            const InterfacePatch patch = interface_interior(e);
            const bool s_is_alpha = face_s == patch.f_lo;
            for (int s = 1; s < ns; ++s) {
                for (int t = 1; t < nt; ++t) {
                    const int alpha = s_is_alpha ? s : t;
                    const int beta = s_is_alpha ? t : s;
                    const int vid =
                        (*patch.vids)[static_cast<std::size_t>((alpha - 1) * (patch.n_beta - 1) + (beta - 1))];
                    place(s, t, vid);
                }
            }
        };
        // a = M: interface across edge (l, j); local s -> top, t -> lft.
        fill_interface(e_u, fr.top, n_, l_, [&](int s, int t, int v) { set_at(m_, s, t, v); });
        // b = N: interface across edge (l, k); local s -> top, t -> rgt.
        fill_interface(e_v, fr.top, m_, l_, [&](int s, int t, int v) { set_at(s, n_, t, v); });
        // c = L: interface across edge (l, i); local s -> lft, t -> rgt.
        fill_interface(e_w, fr.lft, m_, n_, [&](int s, int t, int v) { set_at(s, t, l_, v); });

        // Block-interior vertices: trilinear blend of the eight anchors.
        const Vec3 A000 = vertices_[static_cast<std::size_t>(aC)];
        const Vec3 A100 = vertices_[static_cast<std::size_t>(aU)];
        const Vec3 A010 = vertices_[static_cast<std::size_t>(aV)];
        const Vec3 A001 = vertices_[static_cast<std::size_t>(aW)];
        const Vec3 A110 = vertices_[static_cast<std::size_t>(aTop)];
        const Vec3 A101 = vertices_[static_cast<std::size_t>(aLft)];
        const Vec3 A011 = vertices_[static_cast<std::size_t>(aRgt)];
        const Vec3 A111 = vertices_[static_cast<std::size_t>(aBody)];
        for (int a = 1; a < m_; ++a) {
            for (int b = 1; b < n_; ++b) {
                for (int c = 1; c < l_; ++c) {
                    const double s = static_cast<double>(a) / m_;
                    const double t = static_cast<double>(b) / n_;
                    const double r = static_cast<double>(c) / l_;
                    const Vec3 p = (1 - r) * bilinear(A000, A100, A010, A110, s, t) +
                                   r * bilinear(A001, A101, A011, A111, s, t);
                    set_at(a, b, c, new_vertex(p, false));
                }
            }
        }

        for (int vid : block.vertex_ids) {
            if (vid < 0) throw Error("internal grid error: unassigned lattice vertex");
        }
        blocks_.push_back(std::move(block));
    }

    void collect_cells(HexGrid& grid) const {
        for (const BlockLattice& block : grid.blocks) {
            for (int a = 0; a < block.nu; ++a) {
                for (int b = 0; b < block.nv; ++b) {
                    for (int c = 0; c < block.nw; ++c) {
                        grid.cells.push_back({block.at(a, b, c), block.at(a + 1, b, c),
                                              block.at(a + 1, b + 1, c), block.at(a, b + 1, c),
                                              block.at(a, b, c + 1), block.at(a + 1, b, c + 1),
                                              block.at(a + 1, b + 1, c + 1), block.at(a, b + 1, c + 1)});
                    }
                }
            }
        }
    }

    void collect_neighbors(HexGrid& grid) const {
        grid.neighbors.assign(grid.vertices.size(), {});
        auto link = [&](int p, int q) {
            grid.neighbors[static_cast<std::size_t>(p)].push_back(q);
            grid.neighbors[static_cast<std::size_t>(q)].push_back(p);
        };
        for (const BlockLattice& block : grid.blocks) {
            for (int a = 0; a <= block.nu; ++a) {
                for (int b = 0; b <= block.nv; ++b) {
                    for (int c = 0; c <= block.nw; ++c) {
                        if (a < block.nu) link(block.at(a, b, c), block.at(a + 1, b, c));
                        if (b < block.nv) link(block.at(a, b, c), block.at(a, b + 1, c));
                        if (c < block.nw) link(block.at(a, b, c), block.at(a, b, c + 1));
                    }
                }
            }
        }
        for (std::vector<int>& nb : grid.neighbors) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
    }

    const PolyhedralDomain& d_;
    int m_, n_, l_;
    std::vector<int> face_count_;
    std::vector<Vec3> vertices_;
    std::vector<bool> on_boundary_;
    std::vector<int> corner_anchor_, edgemid_anchor_, facebary_anchor_;
    int body_anchor_ = -1;
    std::map<std::pair<int, int>, std::vector<int>> edge_reg_;
    std::map<int, std::vector<int>> face_reg_;
    std::vector<BlockLattice> blocks_;
};

}  // namespace

HexGrid generate_parametric_grid(const PolyhedralDomain& d, int M, int N, int L) {
    GridBuilder builder(d, M, N, L);
    return builder.build();
}

std::vector<std::array<Vec3, 8>> dual_split(const PolyhedralDomain& d) {
    std::vector<std::array<Vec3, 8>> blocks;
    blocks.reserve(d.corners.size());
    const Vec3 body = d.body_barycenter();
    for (std::size_t l = 0; l < d.corners.size(); ++l) {
        const CornerFrame& fr = d.frames[l];
        const Vec3& cl = d.corners[l];
        const Vec3 mu = 0.5 * (cl + d.corners[static_cast<std::size_t>(fr.j)]);
        const Vec3 mv = 0.5 * (cl + d.corners[static_cast<std::size_t>(fr.k)]);
        const Vec3 mw = 0.5 * (cl + d.corners[static_cast<std::size_t>(fr.i)]);
        blocks.push_back({cl, mu, d.face_barycenter(fr.top), mv, mw, d.face_barycenter(fr.lft), body,
                          d.face_barycenter(fr.rgt)});
    }
    return blocks;
}

}  // namespace gregsolid
