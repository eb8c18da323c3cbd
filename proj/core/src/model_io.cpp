#include "gregsolid/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace gregsolid {
namespace {

using json = nlohmann::ordered_json;

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v))
        throw ArgumentError(what + " is not finite and cannot be serialized");
}

json vec3_to_json(const Vec3& p, const std::string& what) {
    for (int c = 0; c < 3; ++c) require_finite(p[c], what);
    return json::array({p.x(), p.y(), p.z()});
}

json knots_to_json(const KnotVector& kv, const std::string& what) {
    json arr = json::array();
    for (const double t : kv.knots) {
        require_finite(t, what);
        arr.push_back(t);
    }
    return arr;
}

json patch_to_json(const PatchDescriptor& pd, int face) {
    const std::string where = "patch for face " + std::to_string(face);
    json j;
    j["face"] = face;
    if (pd.kind == PatchKind::tensor_spline) {
        j["kind"] = "tensor_spline";
        j["degree_u"] = pd.spline.basis_u.degree;
        j["degree_v"] = pd.spline.basis_v.degree;
        j["knots_u"] = knots_to_json(pd.spline.basis_u, where + ": knot");
        j["knots_v"] = knots_to_json(pd.spline.basis_v, where + ": knot");
        json net = json::array();
        for (const auto& row : pd.spline.control) {
            json r = json::array();
            for (const Vec3& p : row) r.push_back(vec3_to_json(p, where + ": control point"));
            net.push_back(std::move(r));
        }
        j["control_net"] = std::move(net);
        j["face_corners"] = json::array({pd.face_corners[0], pd.face_corners[1],
                                         pd.face_corners[2], pd.face_corners[3]});
    } else {
        j["kind"] = "sampled_grid";
        json rows = json::array();
        for (std::size_t iu = 0; iu < pd.points.size(); ++iu) {
            json row = json::array();
            for (std::size_t iv = 0; iv < pd.points[iu].size(); ++iv) {
                const double u = iu < pd.params_u.size() ? pd.params_u[iu] : 0.0;
                const double v = iv < pd.params_v.size() ? pd.params_v[iv] : 0.0;
                require_finite(u, where + ": parameter");
                require_finite(v, where + ": parameter");
                row.push_back(json::array(
                    {json::array({u, v}), vec3_to_json(pd.points[iu][iv], where + ": point")}));
            }
            rows.push_back(std::move(row));
        }
        j["samples"] = std::move(rows);
    }
    return j;
}

/// Throws IngestionError with the origin prefixed.
[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
    throw IngestionError(origin + ": " + msg);
}

double get_double(const json& j, const std::string& origin, const std::string& what) {
    if (!j.is_number()) fail(origin, what + " must be a finite number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(origin, what + " must be a finite number");
    return v;
}

int get_int(const json& j, const std::string& origin, const std::string& what) {
    if (!j.is_number_integer()) fail(origin, what + " must be an integer");
    return j.get<int>();
}

const json& get_field(const json& j, const char* key, const std::string& origin,
                      const std::string& what) {
    const auto it = j.find(key);
    if (it == j.end()) fail(origin, what + " is missing the '" + key + "' field");
    return *it;
}

Vec3 parse_vec3(const json& j, const std::string& origin, const std::string& what) {
    if (!j.is_array() || j.size() != 3) fail(origin, what + " must be an [x, y, z] triple");
    Vec3 p;
    for (int c = 0; c < 3; ++c) p[c] = get_double(j[static_cast<std::size_t>(c)], origin, what);
    return p;
}

KnotVector parse_knots(const json& degree, const json& knots, const std::string& origin,
                       const std::string& what) {
    KnotVector kv;
    kv.degree = get_int(degree, origin, what + " degree");
    if (kv.degree < 1) fail(origin, what + " degree must be at least 1");
    if (!knots.is_array() || knots.size() < static_cast<std::size_t>(2 * kv.degree + 2))
        fail(origin, what + " knot array is too short for the degree");
    kv.knots.reserve(knots.size());
    for (const auto& t : knots) kv.knots.push_back(get_double(t, origin, what + " knot"));
    return kv;
}

std::pair<int, PatchDescriptor> parse_patch(const json& j, const std::string& origin) {
    if (!j.is_object()) fail(origin, "each entry of 'patches' must be an object");
    const int face = get_int(get_field(j, "face", origin, "a patch"), origin, "patch 'face'");
    if (face < 0) fail(origin, "patch 'face' must be a non-negative face index");
    const std::string where = "patch for face " + std::to_string(face);

    const json& kind = get_field(j, "kind", origin, where);
    if (!kind.is_string()) fail(origin, where + ": 'kind' must be a string");
    const std::string kind_s = kind.get<std::string>();

    PatchDescriptor pd;
    if (kind_s == "tensor_spline") {
        pd.kind = PatchKind::tensor_spline;
        pd.spline.basis_u = parse_knots(get_field(j, "degree_u", origin, where),
                                        get_field(j, "knots_u", origin, where), origin,
                                        where + ": u basis");
        pd.spline.basis_v = parse_knots(get_field(j, "degree_v", origin, where),
                                        get_field(j, "knots_v", origin, where), origin,
                                        where + ": v basis");
        const json& net = get_field(j, "control_net", origin, where);
        if (!net.is_array() || net.empty())
            fail(origin, where + ": 'control_net' must be a non-empty array of rows");
        for (const auto& row : net) {
            if (!row.is_array() || row.empty())
                fail(origin, where + ": control net rows must be non-empty arrays");
            std::vector<Vec3> r;
            r.reserve(row.size());
            for (const auto& p : row)
                r.push_back(parse_vec3(p, origin, where + ": control point"));
            if (!pd.spline.control.empty() && r.size() != pd.spline.control.front().size())
                fail(origin, where + ": control net rows have inconsistent lengths");
            pd.spline.control.push_back(std::move(r));
        }
        const json& fc = get_field(j, "face_corners", origin, where);
        if (!fc.is_array() || fc.size() != 4)
            fail(origin, where + ": 'face_corners' must list 4 corner indices");
        for (int k = 0; k < 4; ++k)
            pd.face_corners[static_cast<std::size_t>(k)] =
                get_int(fc[static_cast<std::size_t>(k)], origin, where + ": face corner");
    } else if (kind_s == "sampled_grid") {
        pd.kind = PatchKind::sampled_grid;
        const json& rows = get_field(j, "samples", origin, where);
        if (!rows.is_array() || rows.size() < 2)
            fail(origin, where + ": 'samples' must hold at least 2 rows");
        for (std::size_t iu = 0; iu < rows.size(); ++iu) {
            const json& row = rows[iu];
            if (!row.is_array() || row.size() < 2)
                fail(origin, where + ": sample rows must hold at least 2 entries");
            if (iu > 0 && row.size() != rows[0].size())
                fail(origin, where + ": sample rows have inconsistent lengths");
            std::vector<Vec3> r;
            r.reserve(row.size());
            for (std::size_t iv = 0; iv < row.size(); ++iv) {
                const json& entry = row[iv];
                const std::string at = where + ": sample (" + std::to_string(iu) + ", " +
                                       std::to_string(iv) + ")";
                if (!entry.is_array() || entry.size() != 2)
                    fail(origin, at + " must be a [[u, v], [x, y, z]] pair");
                const json& uv = entry[0];
                if (!uv.is_array() || uv.size() != 2)
                    fail(origin, at + " must start with a [u, v] parameter pair");
                const double u = get_double(uv[0], origin, at + " parameter");
                const double v = get_double(uv[1], origin, at + " parameter");
                if (iu == 0) pd.params_v.push_back(v);
                if (iv == 0) pd.params_u.push_back(u);
                // every entry must agree with the structured parameter lines
                if (u != pd.params_u[iu] || v != pd.params_v[iv])
                    fail(origin, at + " parameter pair breaks the structured grid");
                r.push_back(parse_vec3(entry[1], origin, at));
            }
            pd.points.push_back(std::move(r));
        }
    } else {
        fail(origin, where + ": unknown patch kind '" + kind_s + "'");
    }
    return {face, std::move(pd)};
}

void validate_report(const RunReport& r, const std::string& origin, bool loading) {
    const auto bad = [&](const std::string& msg) -> void {
        if (loading) fail(origin, msg);
        throw ArgumentError("report: " + msg);
    };
    for (const int n : r.grid_resolution)
        if (n < 1) bad("grid resolution entries must be positive");
    const std::pair<double, const char*> nums[] = {
        {r.avg_j, "avg_j"},
        {r.min_j, "min_j"},
        {r.max_j, "max_j"},
        {r.neg_volume_ratio, "neg_volume_ratio"},
        {r.running_time_seconds, "running_time_seconds"},
        {r.mu, "mu"},
        {r.nu, "nu"},
        {r.rho, "rho"},
        {r.epsilon, "epsilon"},
    };
    for (const auto& [v, name] : nums)
        if (!std::isfinite(v)) bad(std::string(name) + " must be finite");
    if (r.running_time_seconds < 0.0) bad("running_time_seconds must be non-negative");
    int prev = -1;
    for (const IterationRecord& h : r.history) {
        if (h.iteration <= prev) bad("history iterations must be strictly increasing");
        prev = h.iteration;
        const double vals[] = {h.e_smooth,  h.e_positive,      h.sparse_l1,
                               h.objective, h.primal_residual, h.dual_residual};
        for (const double v : vals)
            if (!std::isfinite(v))
                bad("history entry " + std::to_string(h.iteration) + " has a non-finite field");
        if (h.negative_count < 0)
            bad("history entry " + std::to_string(h.iteration) +
                " has a negative sparse_l0 count");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading '" + path + "'");
    return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

std::string model_to_json(const SynthModel& m) {
    json j;
    j["domain"] = m.domain_shape;
    j["metadata"] = {{"name", m.name}, {"units", m.units}};
    json patches = json::array();
    for (std::size_t f = 0; f < m.patches.size(); ++f)
        patches.push_back(patch_to_json(m.patches[f], static_cast<int>(f)));
    j["patches"] = std::move(patches);
    return j.dump(2) + "\n";
}

void save_model(const SynthModel& m, const std::string& path) {
    write_file(path, model_to_json(m));
}

SynthModel parse_model_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        // parse errors proper, plus number-overflow rejections
        fail(origin, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(origin, "top level must be an object");

    SynthModel m;
    const json& dom = get_field(j, "domain", origin, "the model");
    if (!dom.is_string()) fail(origin, "'domain' must be a catalog shape name");
    m.domain_shape = dom.get<std::string>();

    if (const auto it = j.find("metadata"); it != j.end()) {
        if (!it->is_object()) fail(origin, "'metadata' must be an object");
        if (const auto n = it->find("name"); n != it->end() && n->is_string())
            m.name = n->get<std::string>();
        if (const auto u = it->find("units"); u != it->end() && u->is_string())
            m.units = u->get<std::string>();
    }

    const json& patches = get_field(j, "patches", origin, "the model");
    if (!patches.is_array() || patches.empty())
        fail(origin, "'patches' must be a non-empty array");
    std::vector<std::pair<int, PatchDescriptor>> parsed;
    parsed.reserve(patches.size());
    for (const auto& p : patches) parsed.push_back(parse_patch(p, origin));

    const std::size_t count = parsed.size();
    m.patches.resize(count);
    std::vector<bool> seen(count, false);
    bool out_of_range = false;
    for (auto& [face, pd] : parsed) {
        if (face >= static_cast<int>(count)) {
            out_of_range = true;
            continue;
        }
        if (seen[static_cast<std::size_t>(face)])
            fail(origin, "duplicate patch for face " + std::to_string(face));
        seen[static_cast<std::size_t>(face)] = true;
        m.patches[static_cast<std::size_t>(face)] = std::move(pd);
    }
    if (out_of_range) {
        // an index beyond the patch count means some lower face has no patch
        for (std::size_t f = 0; f < count; ++f)
            if (!seen[f]) fail(origin, "no patch for face " + std::to_string(f));
    }
    return m;
}

LoadedModel ingest_model(const SynthModel& record) {
    const std::string origin = "model '" + (record.name.empty() ? "?" : record.name) + "'";
    LoadedModel out;
    out.record = record;
    try {
        out.domain = std::make_shared<const PolyhedralDomain>(build_domain(record.domain_shape));
    } catch (const ArgumentError&) {
        fail(origin, std::string("unknown domain shape '") + record.domain_shape + "'");
    }
    const std::size_t faces = out.domain->faces.size();
    if (record.patches.size() != faces) {
        const std::size_t missing = std::min(record.patches.size(), faces - 1);
        if (record.patches.size() < faces)
            fail(origin, "no patch for face " + std::to_string(missing));
        fail(origin, "has " + std::to_string(record.patches.size()) + " patches but the " +
                         record.domain_shape + " domain has " + std::to_string(faces) +
                         " faces");
    }
    out.patches = std::make_shared<const std::vector<BoundaryPatch>>(
        ingest_patches(*out.domain, record.patches));
    return out;
}

LoadedModel load_model(const std::string& path) {
    return ingest_model(parse_model_text(read_file(path), path));
}

std::string report_to_json(const RunReport& r) {
    validate_report(r, "", false);
    json j;
    j["model"] = r.model_name;
    j["grid_resolution"] =
        json::array({r.grid_resolution[0], r.grid_resolution[1], r.grid_resolution[2]});
    j["avg_j"] = r.avg_j;
    j["min_j"] = r.min_j;
    j["max_j"] = r.max_j;
    j["neg_volume_ratio"] = r.neg_volume_ratio;
    j["running_time_seconds"] = r.running_time_seconds;
    if (r.optimized) {
        j["parameters"] = {{"mu", r.mu}, {"nu", r.nu}, {"rho", r.rho}, {"epsilon", r.epsilon}};
        json hist = json::array();
        for (const IterationRecord& h : r.history) {
            json e;
            e["iteration"] = h.iteration;
            e["e_smooth"] = h.e_smooth;
            e["e_positive"] = h.e_positive;
            e["sparse_l0"] = h.negative_count;
            e["sparse_l1"] = h.sparse_l1;
            e["objective"] = h.objective;
            e["primal_residual"] = h.primal_residual;
            e["dual_residual"] = h.dual_residual;
            hist.push_back(std::move(e));
        }
        j["history"] = std::move(hist);
    }
    return j.dump(2) + "\n";
}

void save_report(const RunReport& r, const std::string& path) {
    write_file(path, report_to_json(r));
}

RunReport parse_report_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        // parse errors proper, plus number-overflow rejections
        fail(origin, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(origin, "top level must be an object");

    RunReport r;
    const json& name = get_field(j, "model", origin, "the report");
    if (!name.is_string()) fail(origin, "'model' must be a string");
    r.model_name = name.get<std::string>();

    const json& res = get_field(j, "grid_resolution", origin, "the report");
    if (!res.is_array() || res.size() != 3)
        fail(origin, "'grid_resolution' must be a [M, N, L] triple");
    for (int k = 0; k < 3; ++k)
        r.grid_resolution[static_cast<std::size_t>(k)] =
            get_int(res[static_cast<std::size_t>(k)], origin, "grid resolution");

    r.avg_j = get_double(get_field(j, "avg_j", origin, "the report"), origin, "avg_j");
    r.min_j = get_double(get_field(j, "min_j", origin, "the report"), origin, "min_j");
    r.max_j = get_double(get_field(j, "max_j", origin, "the report"), origin, "max_j");
    r.neg_volume_ratio = get_double(get_field(j, "neg_volume_ratio", origin, "the report"),
                                    origin, "neg_volume_ratio");
    r.running_time_seconds = get_double(
        get_field(j, "running_time_seconds", origin, "the report"), origin,
        "running_time_seconds");

    if (const auto it = j.find("parameters"); it != j.end()) {
        r.optimized = true;
        if (!it->is_object()) fail(origin, "'parameters' must be an object");
        r.mu = get_double(get_field(*it, "mu", origin, "'parameters'"), origin, "mu");
        r.nu = get_double(get_field(*it, "nu", origin, "'parameters'"), origin, "nu");
        r.rho = get_double(get_field(*it, "rho", origin, "'parameters'"), origin, "rho");
        r.epsilon =
            get_double(get_field(*it, "epsilon", origin, "'parameters'"), origin, "epsilon");
        const json& hist = get_field(j, "history", origin, "an optimization report");
        if (!hist.is_array()) fail(origin, "'history' must be an array");
        for (const auto& e : hist) {
            if (!e.is_object()) fail(origin, "history entries must be objects");
            IterationRecord h;
            h.iteration =
                get_int(get_field(e, "iteration", origin, "a history entry"), origin,
                        "history iteration");
            h.e_smooth = get_double(get_field(e, "e_smooth", origin, "a history entry"),
                                    origin, "e_smooth");
            h.e_positive = get_double(get_field(e, "e_positive", origin, "a history entry"),
                                      origin, "e_positive");
            h.negative_count = get_int(get_field(e, "sparse_l0", origin, "a history entry"),
                                       origin, "sparse_l0");
            h.sparse_l1 = get_double(get_field(e, "sparse_l1", origin, "a history entry"),
                                     origin, "sparse_l1");
            h.objective = get_double(get_field(e, "objective", origin, "a history entry"),
                                     origin, "objective");
            h.primal_residual =
                get_double(get_field(e, "primal_residual", origin, "a history entry"), origin,
                           "primal_residual");
            h.dual_residual =
                get_double(get_field(e, "dual_residual", origin, "a history entry"), origin,
                           "dual_residual");
            r.history.push_back(h);
        }
    }
    validate_report(r, origin, true);
    return r;
}

RunReport load_report(const std::string& path) {
    return parse_report_text(read_file(path), path);
}

}  // namespace gregsolid
