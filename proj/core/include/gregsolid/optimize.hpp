#pragma once

#include <functional>
#include <vector>

#include "gregsolid/gregory.hpp"
#include "gregsolid/grid.hpp"
#include "gregsolid/quality.hpp"
#include "gregsolid/types.hpp"

namespace gregsolid {

/// Tuning knobs for the consensus solver.  All counts and factors must be
/// positive; `subgrad_a` may be 0 to request the automatic step scale of
/// 0.1 x the physical bounding-box diagonal.
struct SolverConfig {
    int max_outer = 50;             ///< outer consensus iterations
    int inner_grad_iters = 15;      ///< gradient-descent steps per X update
    int inner_subgrad_iters = 25;   ///< sub-gradient steps per Y/Z update
    double armijo_c = 1e-4;         ///< sufficient-decrease constant
    double armijo_backtrack = 0.5;  ///< line-search shrink factor
    double armijo_step0 = 1.0;      ///< initial trial step
    double subgrad_a = 0.0;         ///< a in the a/t step schedule (0 = auto)
    double primal_tol = 1e-4;       ///< x sqrt(stacked length) stop threshold
    double dual_tol = 1e-4;         ///< x sqrt(stacked length) stop threshold
    double fd_factor = 1e-4;        ///< FD step = factor x bbox diagonal
};

/// Throws ArgumentError when a config field is out of range.
void validate(const SolverConfig& cfg);

/// Everything the inner solvers need to evaluate objectives as functions of
/// the flat control vector: a solid snapshot, the parametric grid, the affine
/// vertex decomposition, and a scratch grid whose vertices are overwritten on
/// every evaluation (single-threaded use only).
struct AdmmProblem {
    GregorySolid solid;
    HexGrid grid;
    GridMapCache cache;
    double bbox_diag = 1.0;  ///< physical bbox diagonal at the initial controls
    HexGrid work;            ///< scratch mesh; topology of `grid`
};

/// Snapshots the solid, builds the vertex decomposition for the grid, and
/// measures the physical bounding box at the current controls.
AdmmProblem make_admm_problem(const GregorySolid& s, const HexGrid& grid);

/// Per-outer-iteration metrics, all evaluated at the consensus vector X.
struct IterationRecord {
    int iteration = 0;
    double e_smooth = 0.0;
    double e_positive = 0.0;
    double sparse_l1 = 0.0;
    int negative_count = 0;       ///< l0 norm of the negative Jacobian part
    double objective = 0.0;       ///< e_smooth + mu e_positive + nu sparse_l1
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Consensus variables and solver parameters.  X, Y, Z are copies of the flat
/// control vector; U_Y, U_Z are the matching dual vectors.
struct AdmmState {
    std::vector<double> X, Y, Z, U_Y, U_Z;
    double rho = defaults::rho;
    double mu = defaults::mu;
    double nu = defaults::nu;
    double epsilon = defaults::epsilon;
    int iteration = 0;
    std::vector<IterationRecord> history;
};

/// X = Y = Z = the solid's packed controls, duals zero.  Throws ArgumentError
/// for rho <= 0, negative weights, or epsilon <= 0.
AdmmState make_admm_state(const AdmmProblem& pb, double mu, double nu,
                          double rho, double epsilon);

/// Central-difference gradient of f at x with the given step.  Evaluations are
/// coordinate-independent.  Throws ArgumentError for step <= 0 and
/// NumericError naming the coordinate when f returns a non-finite value.
std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double step);

/// Smoothness energy of the mapped grid plus the two scaled consensus
/// penalties rho/2 (|X - Y + U_Y|^2 + |X - Z + U_Z|^2).
double x_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& x);

/// Exact gradient of x_objective: the mapped vertices are affine in the
/// controls, so the smoothness term is a closed-form quadratic.
std::vector<double> x_gradient(AdmmProblem& pb, const AdmmState& st,
                               const std::vector<double>& x);

/// Positivity energy of the mapped grid (weight mu) plus the proximal penalty
/// rho/2 |X - Y + U_Y|^2 centered at the current consensus X.
double y_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& y);

/// Sub-gradient of y_objective; corners with negative Jacobian contribute
/// nothing to the positivity part.
std::vector<double> y_subgradient(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& y);

/// l1 norm of the negative Jacobian part (weight nu) plus the proximal
/// penalty rho/2 |X - Z + U_Z|^2.
double z_objective(AdmmProblem& pb, const AdmmState& st,
                   const std::vector<double>& z);

/// Sub-gradient of z_objective; corners with non-negative Jacobian contribute
/// nothing to the l1 part.
std::vector<double> z_subgradient(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& z);

/// Armijo-backtracking gradient descent on x_objective starting from st.X.
/// The returned point never has a larger objective than the start; a line
/// search that shrinks below 1e-14 stops the update and sets *stalled.
std::vector<double> x_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled = nullptr);

/// Diminishing-step sub-gradient descent on y_objective.  Starts from the
/// better of the incoming st.Y and the proximal point st.X + st.U_Y and keeps
/// the best iterate seen, so the result is never worse than either; with
/// mu = 0 the proximal point is returned exactly.  Reads st.X as the freshly
/// updated consensus vector.
std::vector<double> y_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled = nullptr);

/// Same scheme on z_objective with the proximal point st.X + st.U_Z; with
/// nu = 0, or when no mapped corner Jacobian is negative anywhere the search
/// looks, the proximal point is returned exactly.
std::vector<double> z_update(AdmmProblem& pb, const AdmmState& st,
                             const SolverConfig& cfg, bool* stalled = nullptr);

/// Smoothness / positivity / sparsity readout at one control vector, plus the
/// combined objective e_smooth + mu e_positive + nu sparse_l1.
IterationRecord consensus_metrics(AdmmProblem& pb, const AdmmState& st,
                                  const std::vector<double>& x);

/// Outcome of a solve: the solid rebuilt at the selected consensus vector,
/// the per-iteration history, and the initial / selected metric records.
struct AdmmResult {
    GregorySolid solid;
    std::vector<double> X;
    std::vector<IterationRecord> history;
    IterationRecord initial;       ///< metrics at the starting controls
    IterationRecord selected;      ///< metrics at the returned controls
    bool converged = false;
    int iterations = 0;            ///< outer iterations executed
    int selected_iteration = 0;    ///< 0 = the starting controls
};

/// Runs the consensus loop: X, Y, Z updates, dual steps
/// U += rho ([X;X] - [Y;Z]), residual-based stopping, and per-iteration
/// metric records.  The returned controls are the consensus iterate with the
/// fewest negative Jacobian corners (ties broken by the combined objective)
/// among those that do not regress the starting point, so the result never
/// has more negative corners or a larger objective than the input solid.
/// Throws NumericError with iteration context if any objective turns
/// non-finite.
AdmmResult admm_solve(const GregorySolid& s, const HexGrid& grid,
                      const SolverConfig& cfg = {}, double mu = defaults::mu,
                      double nu = defaults::nu, double rho = defaults::rho,
                      double epsilon = defaults::epsilon);

}  // namespace gregsolid
