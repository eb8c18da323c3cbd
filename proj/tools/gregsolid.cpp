#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gregsolid/gregory.hpp"
#include "gregsolid/grid.hpp"
#include "gregsolid/model_io.hpp"
#include "gregsolid/optimize.hpp"
#include "gregsolid/quality.hpp"
#include "gregsolid/synth.hpp"
#include "gregsolid/vtk_export.hpp"

namespace {

using namespace gregsolid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIngestion = 2;
constexpr int kExitNumeric = 3;

/// "MxNxL" (or a single "N" for a uniform resolution) -> three positive ints.
std::array<int, 3> parse_grid_spec(const std::string& spec) {
    std::array<int, 3> out{0, 0, 0};
    std::string part;
    std::istringstream ss(spec);
    int k = 0;
    while (std::getline(ss, part, 'x')) {
        if (k == 3) throw ArgumentError("grid spec '" + spec + "' has more than 3 parts");
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            throw ArgumentError("grid spec '" + spec + "' is not MxNxL");
        }
        if (used != part.size() || v < 1)
            throw ArgumentError("grid spec '" + spec + "' needs positive integers");
        out[static_cast<std::size_t>(k++)] = v;
    }
    if (k == 1) out[1] = out[2] = out[0];
    else if (k != 3) throw ArgumentError("grid spec '" + spec + "' is not MxNxL");
    return out;
}

/// Loads a model from a file path, or from standard input for "-".
LoadedModel read_model(const std::string& path) {
    if (path != "-") return load_model(path);
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    if (std::cin.bad()) throw IoError("failed while reading the model from standard input");
    return ingest_model(parse_model_text(std::move(ss).str(), "<stdin>"));
}

void emit_report(const RunReport& report, const std::string& report_path) {
    if (report_path.empty())
        std::cout << report_to_json(report);
    else
        save_report(report, report_path);
}

RunReport quality_summary(const LoadedModel& model, const HexGrid& mapped,
                          const std::array<int, 3>& res, double seconds) {
    const JacobianVector jv = jacobian_vector(mapped);
    RunReport report;
    report.model_name = model.record.name;
    report.grid_resolution = res;
    const QualityReport q = make_quality_report(mapped, jv, seconds);
    report.avg_j = q.avg_j;
    report.min_j = q.min_j;
    report.max_j = q.max_j;
    report.neg_volume_ratio = q.neg_ratio;
    report.running_time_seconds = seconds;
    return report;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run(int argc, char** argv) {
    CLI::App app{"Trivariate solid construction and hexahedral grid quality tools"};
    app.require_subcommand(1);

    // ---- build ----------------------------------------------------------
    std::string build_model = "-";
    std::string build_grid = "4x4x4";
    std::string build_out;
    std::string build_report;
    CLI::App* build = app.add_subcommand(
        "build", "Fill a model with the solid and generate a conforming hex grid");
    build->add_option("model", build_model, "Model file ('-' reads standard input)");
    build->add_option("--grid", build_grid, "Cells per block, MxNxL or a single N");
    build->add_option("-o,--out", build_out, "Write the mapped grid as legacy VTK");
    build->add_option("--report", build_report,
                      "Write the quality report JSON here instead of standard output");

    // ---- optimize -------------------------------------------------------
    std::string opt_model = "-";
    std::string opt_grid = "4x4x4";
    std::string opt_out;
    std::string opt_report;
    double opt_mu = defaults::mu;
    double opt_nu = defaults::nu;
    double opt_rho = defaults::rho;
    double opt_eps = defaults::epsilon;
    int opt_max_iters = 50;
    double opt_tol = 1e-4;
    CLI::App* optimize = app.add_subcommand(
        "optimize", "Improve grid quality by adjusting the free tangent controls");
    optimize->add_option("model", opt_model, "Model file ('-' reads standard input)");
    optimize->add_option("--grid", opt_grid, "Cells per block, MxNxL or a single N");
    optimize->add_option("--mu", opt_mu, "Positivity weight");
    optimize->add_option("--nu", opt_nu, "Sparsity weight");
    optimize->add_option("--rho", opt_rho, "Consensus penalty");
    optimize->add_option("--epsilon", opt_eps, "Positivity barrier offset");
    optimize->add_option("--max-iters", opt_max_iters, "Outer iteration cap");
    optimize->add_option("--tol", opt_tol, "Primal/dual residual tolerance");
    optimize->add_option("-o,--out", opt_out, "Write the optimized grid as legacy VTK");
    optimize->add_option("--report", opt_report,
                         "Write the optimization report JSON here instead of standard output");

    // ---- synth ----------------------------------------------------------
    std::string synth_kind;
    double synth_magnitude = 0.0;
    std::string synth_out;
    CLI::App* synth = app.add_subcommand(
        "synth", "Generate a built-in test model (cube, twisted_prism, bulged_pentaprism)");
    synth->add_option("kind", synth_kind, "Model family")->required();
    synth->add_option("--magnitude", synth_magnitude, "Deformation magnitude (>= 0)");
    synth->add_option("-o,--out", synth_out,
                      "Write the model JSON here instead of standard output");

    // ---- report ---------------------------------------------------------
    std::string rep_model = "-";
    std::string rep_grid = "4x4x4";
    std::string rep_report;
    CLI::App* report_cmd =
        app.add_subcommand("report", "Quality summary of a model without writing a mesh");
    report_cmd->add_option("model", rep_model, "Model file ('-' reads standard input)");
    report_cmd->add_option("--grid", rep_grid, "Cells per block, MxNxL or a single N");
    report_cmd->add_option("--report", rep_report,
                           "Write the report JSON here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // help requests exit 0 through CLI11; real parse errors are usage errors
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth) {
            SynthModel m = synth_model(synth_kind, synth_magnitude);
            if (synth_out.empty())
                std::cout << model_to_json(m);
            else
                save_model(m, synth_out);
            return kExitOk;
        }

        if (*build || *report_cmd) {
            const bool writing_mesh = *build && !build_out.empty();
            const std::string& model_path = *build ? build_model : rep_model;
            const std::array<int, 3> res = parse_grid_spec(*build ? build_grid : rep_grid);
            const auto t0 = std::chrono::steady_clock::now();
            const LoadedModel model = read_model(model_path);
            const GregorySolid solid = build_gregory_solid(model.domain, model.patches);
            const HexGrid grid =
                generate_parametric_grid(*model.domain, res[0], res[1], res[2]);
            const HexGrid mapped = map_grid(solid, grid);
            const RunReport out =
                quality_summary(model, mapped, res, seconds_since(t0));
            if (writing_mesh) export_vtk(mapped, jacobian_vector(mapped), build_out);
            emit_report(out, *build ? build_report : rep_report);
            return kExitOk;
        }

        // optimize
        const std::array<int, 3> res = parse_grid_spec(opt_grid);
        const auto t0 = std::chrono::steady_clock::now();
        const LoadedModel model = read_model(opt_model);
        const GregorySolid solid = build_gregory_solid(model.domain, model.patches);
        const HexGrid grid = generate_parametric_grid(*model.domain, res[0], res[1], res[2]);
        SolverConfig cfg;
        cfg.max_outer = opt_max_iters;
        cfg.primal_tol = opt_tol;
        cfg.dual_tol = opt_tol;
        const AdmmResult result =
            admm_solve(solid, grid, cfg, opt_mu, opt_nu, opt_rho, opt_eps);
        const HexGrid mapped = map_grid(result.solid, grid);
        RunReport out = quality_summary(model, mapped, res, seconds_since(t0));
        out.optimized = true;
        out.mu = opt_mu;
        out.nu = opt_nu;
        out.rho = opt_rho;
        out.epsilon = opt_eps;
        out.history.reserve(result.history.size() + 1);
        out.history.push_back(result.initial);  // iteration 0: pre-optimization state
        for (const IterationRecord& h : result.history) out.history.push_back(h);
        if (!opt_out.empty()) export_vtk(mapped, jacobian_vector(mapped), opt_out);
        emit_report(out, opt_report);
        return kExitOk;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IngestionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIngestion;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIngestion;
    } catch (const Error& e) {
        // numeric, domain, and fitting failures
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
