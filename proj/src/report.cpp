#include "mixedsys/report.hpp"

#include <cstdio>

namespace mixedsys {

std::string_view tool_version() { return MIXEDSYS_VERSION; }

Json to_json(const Scalar& q) { return to_string(q); }

Json to_json(const Interval& iv) { return Json::array({to_string(iv.lo), to_string(iv.hi)}); }

Json to_json(const ExtCount& c) {
    if (c.is_infinite()) return "inf";
    return c.value();
}

Json to_json(const SparseVector& v) {
    Json out = Json::array();
    for (const auto& e : v.entries()) out.push_back(Json::array({e.index, to_string(e.value)}));
    return out;
}

Json to_json(const ClassifyOptions& opts) {
    Json j;
    j["decay_threshold"] = to_json(opts.decay_threshold);
    j["min_points"] = opts.min_points;
    j["window"] = opts.window;
    j["n_list"] = opts.n_list;
    j["max_bits"] = opts.exact.max_bits;
    return j;
}

Json to_json(const MetricOptions& opts) {
    Json j;
    j["terms"] = opts.terms;
    j["precision"] = opts.precision;
    j["max_bits"] = opts.exact.max_bits;
    return j;
}

Json report_envelope(std::string_view command, Json config, Json provenance) {
    Json j;
    j["tool"] = "mixedsys";
    j["version"] = tool_version();
    j["schema"] = report_schema_version;
    j["command"] = command;
    j["config"] = std::move(config);
    j["provenance"] = std::move(provenance);
    return j;
}

namespace {

Json vectors_json(const std::vector<SparseVector>& vs) {
    Json out = Json::array();
    for (const auto& v : vs) out.push_back(to_json(v));
    return out;
}

} // namespace

Json defect_json(const DefectReport& r) {
    Json j;
    j["family"] = r.family;
    j["sigma"] = r.sigma;
    j["n"] = r.n;
    j["options"] = to_json(r.options);
    j["verdict"] = r.verdict.to_string();
    j["certificate"] = r.certificate;
    j["predicted"] = r.predicted ? to_json(*r.predicted) : Json(nullptr);
    j["truncated_defect"] = r.truncated_defect;

    Json norm;
    norm["sigma"] = r.normalized_sigma;
    norm["moved"] = r.moved;
    norm["exceptional"] = r.check.exceptional;
    norm["exceptional_within_moved"] = r.check.ok;
    j["normalization"] = std::move(norm);

    Json w;
    w["dim"] = r.witness_dim;
    w["unbounded"] = r.witnesses_unbounded;
    w["ranks"] = r.witness_ranks;
    w["vectors"] = vectors_json(r.witnesses);
    j["witnesses"] = std::move(w);

    Json decay = Json::array();
    for (const auto& row : r.decay) {
        Json d;
        d["probe"] = r.probe_labels.at(row.probe);
        d["n"] = row.n;
        d["dist_sq"] = to_json(row.dist_sq);
        decay.push_back(std::move(d));
    }
    j["decay"] = std::move(decay);
    return j;
}

Json chain_json(const ChainReport& r) {
    Json j;
    j["h_dims"] = r.h_dims;
    j["intersection_dims"] = r.dims;
    j["h_sigma_dim"] = r.h_sigma_dim;
    j["equal_to_h_sigma"] = r.equal_to_h_sigma;
    Json dist = Json::array();
    for (const auto& d : r.probe_dist_sq) dist.push_back(to_json(d));
    j["probe_dist_sq"] = std::move(dist);
    j["intersection"] = vectors_json(r.intersection);
    return j;
}

Json convergence_json(const ConvergenceReport& r) {
    Json j;
    j["ds_limit_to_zero"] = to_json(r.ds_limit_to_zero);
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json o;
        o["m"] = row.m;
        o["sigma_m"] = row.sigma_m;
        o["rho"] = to_json(row.rho);
        o["prefix"] = to_json(row.prefix);
        o["ds_to_zero"] = to_json(row.ds_to_zero);
        Json proxies = Json::array();
        for (const auto& p : row.proxies) proxies.push_back(to_json(p));
        o["proxies"] = std::move(proxies);
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    return j;
}

Json semicontinuity_json(const SemicontinuityReport& r) {
    Json j;
    j["tail_from"] = r.tail_from;
    j["tail_range"] = to_json(r.tail_range);
    j["margin"] = to_json(r.margin);
    j["violation"] = r.violation;
    j["jump_up"] = r.jump_up;
    j["convergence"] = convergence_json(r.convergence);
    return j;
}

Json swap_suite_json(const SwapSuiteResult& r) {
    Json j;
    j["suite"] = "swap";
    j["pass"] = r.violations == 0;
    j["instances"] = r.instances;
    j["checks"] = r.checks;
    j["violations"] = r.violations;
    j["failures"] = r.failures;
    return j;
}

Json hereditary_suite_json(const HereditarySuiteResult& r) {
    Json j;
    j["suite"] = "hereditary";
    j["pass"] = r.nonzero == 0;
    j["instances"] = r.instances;
    j["selections"] = r.selections;
    j["nonzero"] = r.nonzero;
    j["failures"] = r.failures;
    return j;
}

void CsvTable::add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

namespace {

void put_field(std::string& out, const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void put_row(std::string& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        put_field(out, row[i]);
    }
    out += '\n';
}

} // namespace

std::string CsvTable::str() const {
    std::string out;
    put_row(out, header_);
    for (const auto& r : rows_) put_row(out, r);
    return out;
}

std::string decimal(const Scalar& q) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", approx(q));
    return buf;
}

CsvTable decay_csv(const DefectReport& r, bool with_decimal) {
    std::vector<std::string> header{"probe", "probe_label", "n", "dist_sq"};
    if (with_decimal) header.push_back("dist_sq_approx");
    CsvTable t(std::move(header));
    for (const auto& row : r.decay) {
        std::vector<std::string> f{std::to_string(row.probe), r.probe_labels.at(row.probe), std::to_string(row.n),
                                   to_string(row.dist_sq)};
        if (with_decimal) f.push_back(decimal(row.dist_sq));
        t.add(std::move(f));
    }
    return t;
}

CsvTable convergence_csv(const ConvergenceReport& r, bool with_decimal) {
    std::vector<std::string> header{"m", "sigma_m", "rho", "prefix", "ds_lo", "ds_hi"};
    if (with_decimal) header.push_back("ds_mid_approx");
    CsvTable t(std::move(header));
    for (const auto& row : r.rows) {
        std::vector<std::string> f{std::to_string(row.m), row.sigma_m, to_string(row.rho), row.prefix.to_string(),
                                   to_string(row.ds_to_zero.lo), to_string(row.ds_to_zero.hi)};
        if (with_decimal) f.push_back(decimal((row.ds_to_zero.lo + row.ds_to_zero.hi) / 2));
        t.add(std::move(f));
    }
    return t;
}

} // namespace mixedsys
