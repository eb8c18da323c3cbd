#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "gregsolid/boundary.hpp"
#include "gregsolid/domain.hpp"
#include "gregsolid/optimize.hpp"
#include "gregsolid/synth.hpp"

namespace gregsolid {

// SynthModel doubles as the in-memory image of a model file: a catalog domain
// shape, metadata (name, units), and one boundary-patch descriptor per face.
// The JSON schema mirrors it field by field; serialized numbers use the
// shortest representation that parses back to the identical double, so
// save -> load -> save is byte-stable.

/// Serialize a model record to JSON text (trailing newline included).
/// Throws ArgumentError when a coordinate or parameter is not finite.
std::string model_to_json(const SynthModel& m);

/// Write model_to_json(m) to `path`.  Throws IoError when the file cannot be
/// created or written.
void save_model(const SynthModel& m, const std::string& path);

/// Parse JSON text into a model record, checking the schema only (no domain
/// or watertightness validation).  `origin` names the source in diagnostics,
/// e.g. a file path.  Throws IngestionError naming the offending face or
/// field on any violation.
SynthModel parse_model_text(const std::string& text, const std::string& origin);

/// A fully validated model: the parsed record plus the built domain and the
/// ingested, watertightness-checked boundary patches.
struct LoadedModel {
    SynthModel record;
    std::shared_ptr<const PolyhedralDomain> domain;
    std::shared_ptr<const std::vector<BoundaryPatch>> patches;
};

/// Validate a parsed record end to end: build the catalog domain, check one
/// patch per face, and ingest with watertightness checks.  Errors carry face
/// or edge identifiers.
LoadedModel ingest_model(const SynthModel& record);

/// Read, parse, and ingest a model file.  Throws IoError when unreadable,
/// IngestionError on schema, domain, or watertightness violations.
LoadedModel load_model(const std::string& path);

/// Summary of one build or optimize run, mirroring the statistics table of
/// the report files: grid resolution, scaled-Jacobian aggregates, the
/// negative-volume ratio, and wall time.  Optimization runs additionally
/// carry the (mu, nu, rho, epsilon) weights and the per-iteration history
/// (entry 0 is the pre-optimization state).
struct RunReport {
    std::string model_name;
    std::array<int, 3> grid_resolution{0, 0, 0};
    double avg_j = 0.0;
    double min_j = 0.0;
    double max_j = 0.0;
    double neg_volume_ratio = 0.0;
    double running_time_seconds = 0.0;

    bool optimized = false;  ///< whether the weight/history fields apply
    double mu = defaults::mu;
    double nu = defaults::nu;
    double rho = defaults::rho;
    double epsilon = defaults::epsilon;
    std::vector<IterationRecord> history;  ///< strictly increasing iterations
};

/// Serialize a report to JSON text (trailing newline included).  Throws
/// ArgumentError when a numeric field is not finite or the history iteration
/// indices are not strictly increasing.
std::string report_to_json(const RunReport& r);

/// Write report_to_json(r) to `path`.  Throws IoError when the file cannot
/// be created or written.
void save_report(const RunReport& r, const std::string& path);

/// Parse JSON text into a report, enforcing the same finiteness and
/// history-monotonicity invariants (IngestionError on violation).
RunReport parse_report_text(const std::string& text, const std::string& origin);

/// Read and parse a report file.  Throws IoError when unreadable.
RunReport load_report(const std::string& path);

}  // namespace gregsolid
