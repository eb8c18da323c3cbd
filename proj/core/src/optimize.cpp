#include "gregsolid/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

namespace gregsolid {

namespace {

constexpr double kStallStep = 1e-14;

void require(bool ok, const std::string& what) {
    if (!ok) throw ArgumentError(what);
}

/// Overwrites the scratch mesh vertices with the positions for x.
void set_vertices(AdmmProblem& pb, const std::vector<double>& x) {
    pb.work.vertices = apply_grid_map_cache(pb.cache, x);
}

/// Sum of (a - b + u)^2, the squared consensus penalty distance.
double prox_sq(const std::vector<double>& a, const std::vector<double>& b,
               const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i] + u[i];
        s += d * d;
    }
    return s;
}

/// Gradient of the smoothness energy with respect to every vertex position.
std::vector<Vec3> smooth_vertex_gradient(const HexGrid& g) {
    std::vector<Vec3> grad(g.vertices.size(), Vec3::Zero());
    for (std::size_t m = 0; m < g.vertices.size(); ++m) {
        if (g.on_boundary[m] || g.neighbors[m].empty()) continue;
        const double k = static_cast<double>(g.neighbors[m].size());
        Vec3 diff = Vec3::Zero();
        for (const int n : g.neighbors[m]) {
            diff += g.vertices[m] - g.vertices[static_cast<std::size_t>(n)];
        }
        const Vec3 d = diff / k;  // vertex minus its neighbor mean
        grad[m] += 2.0 * d;
        for (const int n : g.neighbors[m]) {
            grad[static_cast<std::size_t>(n)] -= (2.0 / k) * d;
        }
    }
    return grad;
}

/// Pushes a per-vertex gradient through the affine decomposition into the
/// flat control coordinates.
std::vector<double> scatter_to_controls(const AdmmProblem& pb,
                                        const std::vector<Vec3>& gv) {
    std::vector<double> g(3u * static_cast<std::size_t>(pb.cache.n_variables), 0.0);
    for (std::size_t n = 0; n < gv.size(); ++n) {
        for (const auto& [m, f] : pb.cache.coeffs[n]) {
            const std::size_t base = 3u * static_cast<std::size_t>(m);
            g[base + 0] += f * gv[n].x();
            g[base + 1] += f * gv[n].y();
            g[base + 2] += f * gv[n].z();
        }
    }
    return g;
}

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

/// Diminishing-step sub-gradient descent used by the Y and Z updates: start
/// from the better of {proximal point, incoming iterate}, prefer the proximal
/// point on ties, and return the best point seen.
template <class Value, class Subgrad>
std::vector<double> subgradient_best(AdmmProblem& pb, const SolverConfig& cfg,
                                     const std::vector<double>& incoming,
                                     std::vector<double> prox_point,
                                     const Value& value, const Subgrad& subgrad,
                                     const char* tag) {
    const double f_prox = value(prox_point);
    const double f_in = value(incoming);
    if (!std::isfinite(f_prox) || !std::isfinite(f_in)) {
        throw NumericError(std::string(tag) +
                           ": non-finite objective at the starting points");
    }
    std::vector<double> best =
        (f_prox <= f_in) ? std::move(prox_point) : incoming;
    double f_best = std::min(f_prox, f_in);
    std::vector<double> cur = best;
    const double a = cfg.subgrad_a > 0.0 ? cfg.subgrad_a : 0.1 * pb.bbox_diag;
    for (int t = 1; t <= cfg.inner_subgrad_iters; ++t) {
        const std::vector<double> g = subgrad(cur);
        const double gn = vec_norm(g);
        if (gn == 0.0) break;  // stationary for the sub-gradient we use
        const double scale = a / (static_cast<double>(t) * gn);
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] -= scale * g[i];
        const double f = value(cur);
        if (!std::isfinite(f)) {
            throw NumericError(std::string(tag) + ": non-finite objective at step " +
                               std::to_string(t));
        }
        if (f < f_best) {
            f_best = f;
            best = cur;
        }
    }
    return best;
}

bool qualifies(const IterationRecord& rec, const IterationRecord& initial) {
    return rec.negative_count <= initial.negative_count &&
           rec.objective <= initial.objective;
}

bool improves(const IterationRecord& rec, const IterationRecord& selected) {
    if (rec.negative_count != selected.negative_count) {
        return rec.negative_count < selected.negative_count;
    }
    return rec.objective < selected.objective;
}

void check_finite(const IterationRecord& rec, const AdmmState& st) {
    if (std::isfinite(rec.objective) && std::isfinite(rec.primal_residual) &&
        std::isfinite(rec.dual_residual)) {
        return;
    }
    throw NumericError(
        "consensus solve: non-finite state at iteration " +
        std::to_string(rec.iteration) + " (E_smooth=" + std::to_string(rec.e_smooth) +
        ", E_positive=" + std::to_string(rec.e_positive) +
        ", l1=" + std::to_string(rec.sparse_l1) +
        ", |X|=" + std::to_string(vec_norm(st.X)) +
        ", |Y|=" + std::to_string(vec_norm(st.Y)) +
        ", |Z|=" + std::to_string(vec_norm(st.Z)) + ")");
}

}  // namespace

void validate(const SolverConfig& cfg) {
    require(cfg.max_outer >= 1, "solver config: max_outer must be positive");
    require(cfg.inner_grad_iters >= 1,
            "solver config: inner_grad_iters must be positive");
    require(cfg.inner_subgrad_iters >= 1,
            "solver config: inner_subgrad_iters must be positive");
    require(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0,
            "solver config: armijo_c must lie in (0, 1)");
    require(cfg.armijo_backtrack > 0.0 && cfg.armijo_backtrack < 1.0,
            "solver config: armijo_backtrack must lie in (0, 1)");
    require(cfg.armijo_step0 > 0.0, "solver config: armijo_step0 must be positive");
    require(cfg.subgrad_a >= 0.0, "solver config: subgrad_a must be non-negative");
    require(cfg.primal_tol > 0.0 && cfg.dual_tol > 0.0,
            "solver config: residual tolerances must be positive");
    require(cfg.fd_factor > 0.0, "solver config: fd_factor must be positive");
}

AdmmProblem make_admm_problem(const GregorySolid& s, const HexGrid& grid) {
    AdmmProblem pb;
    pb.solid = s;
    pb.grid = grid;
    pb.cache = build_grid_map_cache(s, grid);
    pb.work = grid;
    pb.work.vertices = apply_grid_map_cache(pb.cache, pack_variables(s));
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : pb.work.vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double diag = (hi - lo).norm();
    pb.bbox_diag = (std::isfinite(diag) && diag > 1e-12) ? diag : 1.0;
    return pb;
}

AdmmState make_admm_state(const AdmmProblem& pb, double mu, double nu,
                          double rho, double epsilon) {
    require(rho > 0.0, "consensus state: rho must be positive");
    require(mu >= 0.0, "consensus state: mu must be non-negative");
    require(nu >= 0.0, "consensus state: nu must be non-negative");
    require(epsilon > 0.0, "consensus state: epsilon must be positive");
    AdmmState st;
    st.X = pack_variables(pb.solid);
    st.Y = st.X;
    st.Z = st.X;
    st.U_Y.assign(st.X.size(), 0.0);
    st.U_Z.assign(st.X.size(), 0.0);
    st.rho = rho;
    st.mu = mu;
    st.nu = nu;
    st.epsilon = epsilon;
    return st;
}

std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ArgumentError("numeric gradient: step must be positive and finite");
    }
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + step;
        const double fp = f(x);
        x[i] = xi - step;
        const double fm = f(x);
        x[i] = xi;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw NumericError("numeric gradient: non-finite value at coordinate " +
                               std::to_string(i));
        }
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

double x_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& x) {
    set_vertices(pb, x);
    return e_smooth(pb.work) +
           0.5 * st.rho * (prox_sq(x, st.Y, st.U_Y) + prox_sq(x, st.Z, st.U_Z));
}

std::vector<double> x_gradient(AdmmProblem& pb, const AdmmState& st,
                               const std::vector<double>& x) {
    set_vertices(pb, x);
    std::vector<double> g = scatter_to_controls(pb, smooth_vertex_gradient(pb.work));
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] += st.rho * ((x[i] - st.Y[i] + st.U_Y[i]) + (x[i] - st.Z[i] + st.U_Z[i]));
    }
    return g;
}

std::vector<double> x_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled) {
    if (stalled) *stalled = false;
    std::vector<double> x = st.X;
    double fx = x_objective(pb, st, x);
    if (!std::isfinite(fx)) {
        throw NumericError("x update: non-finite objective at the incoming point");
    }
    std::vector<double> trial(x.size());
    for (int it = 0; it < cfg.inner_grad_iters; ++it) {
        const std::vector<double> g = x_gradient(pb, st, x);
        double gsq = 0.0;
        for (const double gi : g) gsq += gi * gi;
        if (gsq <= 1e-30) break;  // already stationary
        double step = cfg.armijo_step0;
        bool accepted = false;
        while (step >= kStallStep) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - step * g[i];
            const double ft = x_objective(pb, st, trial);
            if (std::isfinite(ft) && ft <= fx - cfg.armijo_c * step * gsq) {
                x = trial;
                fx = ft;
                accepted = true;
                break;
            }
            step *= cfg.armijo_backtrack;
        }
        if (!accepted) {
            if (stalled) *stalled = true;
            return x;
        }
    }
    return x;
}

double y_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& y) {
    const double prox = 0.5 * st.rho * prox_sq(st.X, y, st.U_Y);
    if (st.mu == 0.0) return prox;
    set_vertices(pb, y);
    const JacobianVector jv = jacobian_vector(pb.work);
    return st.mu * e_positive(jv, st.epsilon) + prox;
}

std::vector<double> y_subgradient(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& y) {
    std::vector<double> g(y.size(), 0.0);
    if (st.mu != 0.0) {
        set_vertices(pb, y);
        std::vector<Vec3> gv(pb.work.vertices.size(), Vec3::Zero());
        std::array<Vec3, 8> pts;
        for (const auto& cell : pb.work.cells) {
            for (int k = 0; k < 8; ++k) {
                pts[static_cast<std::size_t>(k)] =
                    pb.work.vertices[static_cast<std::size_t>(cell[static_cast<std::size_t>(k)])];
            }
            for (int h = 0; h < 8; ++h) {
                const double j = scaled_jacobian(pts, h);
                if (j < 0.0) continue;  // excluded from the positivity sum
                const double c = -st.mu / ((j + st.epsilon) * (j + st.epsilon));
                for (const auto& [idx, dj] : scaled_jacobian_gradient(pts, h)) {
                    gv[static_cast<std::size_t>(cell[static_cast<std::size_t>(idx)])] += c * dj;
                }
            }
        }
        g = scatter_to_controls(pb, gv);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        g[i] += st.rho * (y[i] - st.X[i] - st.U_Y[i]);
    }
    return g;
}

double z_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& z) {
    const double prox = 0.5 * st.rho * prox_sq(st.X, z, st.U_Z);
    if (st.nu == 0.0) return prox;
    set_vertices(pb, z);
    const JacobianVector jv = jacobian_vector(pb.work);
    return st.nu * e_sparse(jv).l1 + prox;
}

std::vector<double> z_subgradient(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& z) {
    std::vector<double> g(z.size(), 0.0);
    if (st.nu != 0.0) {
        set_vertices(pb, z);
        std::vector<Vec3> gv(pb.work.vertices.size(), Vec3::Zero());
        std::array<Vec3, 8> pts;
        for (const auto& cell : pb.work.cells) {
            for (int k = 0; k < 8; ++k) {
                pts[static_cast<std::size_t>(k)] =
                    pb.work.vertices[static_cast<std::size_t>(cell[static_cast<std::size_t>(k)])];
            }
            for (int h = 0; h < 8; ++h) {
                const double j = scaled_jacobian(pts, h);
                if (j >= 0.0) continue;  // zero sub-gradient where the negative part vanishes
                for (const auto& [idx, dj] : scaled_jacobian_gradient(pts, h)) {
                    gv[static_cast<std::size_t>(cell[static_cast<std::size_t>(idx)])] -= st.nu * dj;
                }
            }
        }
        g = scatter_to_controls(pb, gv);
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        g[i] += st.rho * (z[i] - st.X[i] - st.U_Z[i]);
    }
    return g;
}

std::vector<double> y_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled) {
    if (stalled) *stalled = false;
    std::vector<double> prox_point(st.X.size());
    for (std::size_t i = 0; i < prox_point.size(); ++i) {
        prox_point[i] = st.X[i] + st.U_Y[i];
    }
    return subgradient_best(
        pb, cfg, st.Y, std::move(prox_point),
        [&](const std::vector<double>& y) { return y_objective(pb, st, y); },
        [&](const std::vector<double>& y) { return y_subgradient(pb, st, y); },
        "y update");
}

std::vector<double> z_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled) {
    if (stalled) *stalled = false;
    std::vector<double> prox_point(st.X.size());
    for (std::size_t i = 0; i < prox_point.size(); ++i) {
        prox_point[i] = st.X[i] + st.U_Z[i];
    }
    return subgradient_best(
        pb, cfg, st.Z, std::move(prox_point),
        [&](const std::vector<double>& z) { return z_objective(pb, st, z); },
        [&](const std::vector<double>& z) { return z_subgradient(pb, st, z); },
        "z update");
}

IterationRecord consensus_metrics(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& x) {
    set_vertices(pb, x);
    IterationRecord rec;
    rec.e_smooth = e_smooth(pb.work);
    const JacobianVector jv = jacobian_vector(pb.work);
    rec.e_positive = e_positive(jv, st.epsilon);
    const SparseNorms sn = e_sparse(jv);
    rec.negative_count = sn.l0;
    rec.sparse_l1 = sn.l1;
    rec.objective = rec.e_smooth + st.mu * rec.e_positive + st.nu * rec.sparse_l1;
    return rec;
}

AdmmResult admm_solve(const GregorySolid& s, const HexGrid& grid,
                      const SolverConfig& cfg, double mu, double nu, double rho,
                      double epsilon) {
    validate(cfg);
    AdmmProblem pb = make_admm_problem(s, grid);
    AdmmState st = make_admm_state(pb, mu, nu, rho, epsilon);
    const std::size_t n = st.X.size();

    AdmmResult res;
    res.initial = consensus_metrics(pb, st, st.X);
    check_finite(res.initial, st);
    res.selected = res.initial;
    res.selected_iteration = 0;
    std::vector<double> best_x = st.X;

    const double tol_scale = std::sqrt(2.0 * static_cast<double>(n));
    for (int t = 1; t <= cfg.max_outer; ++t) {
        st.X = x_update(pb, st, cfg);
        const std::vector<double> y_prev = st.Y;
        const std::vector<double> z_prev = st.Z;
        st.Y = y_update(pb, st, cfg);
        st.Z = z_update(pb, st, cfg);

        double primal_sq = 0.0;
        double dual_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double rxy = st.X[i] - st.Y[i];
            const double rxz = st.X[i] - st.Z[i];
            st.U_Y[i] += st.rho * rxy;
            st.U_Z[i] += st.rho * rxz;
            primal_sq += rxy * rxy + rxz * rxz;
            const double dy = st.Y[i] - y_prev[i];
            const double dz = st.Z[i] - z_prev[i];
            dual_sq += dy * dy + dz * dz;
        }

        IterationRecord rec = consensus_metrics(pb, st, st.X);
        rec.iteration = t;
        rec.primal_residual = std::sqrt(primal_sq);
        rec.dual_residual = st.rho * std::sqrt(dual_sq);
        check_finite(rec, st);
        st.iteration = t;
        st.history.push_back(rec);

        if (qualifies(rec, res.initial) && improves(rec, res.selected)) {
            res.selected = rec;
            res.selected_iteration = t;
            best_x = st.X;
        }
        if (rec.primal_residual <= cfg.primal_tol * tol_scale &&
            rec.dual_residual <= cfg.dual_tol * tol_scale) {
            res.converged = true;
            break;
        }
    }

    res.history = st.history;
    res.iterations = st.iteration;
    res.X = std::move(best_x);
    res.solid = pb.solid;
    unpack_variables(res.solid, res.X);
    return res;
}

}  // namespace gregsolid
