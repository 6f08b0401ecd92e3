#include "mixedsys/errors.hpp"
#include "mixedsys/parallel.hpp"
#include "mixedsys/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>

using namespace mixedsys;

namespace {

constexpr int exit_input = 2;
constexpr int exit_budget = 3;
constexpr int exit_invariant = 4;

struct Common {
    int threads = 0;
    std::size_t max_bits = 0;
    std::string out = "-";
    std::string csv;
    bool decimal = false;
};

struct FamilyArgs {
    std::string family;
    std::size_t n = 0;
};

struct ClassifyArgs {
    std::string threshold = "1/100";
    std::size_t min_points = 4;
    std::size_t window = 0;
    std::vector<std::size_t> n_list;
};

struct MetricArgs {
    std::size_t terms = 10;
    unsigned precision = 64;
};

unsigned default_precision() {
    const char* env = std::getenv("MIXEDSYS_PRECISION");
    if (!env || !*env) return 64;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end || v == 0 || v > 100000) throw ParseError(std::string("MIXEDSYS_PRECISION is not a positive integer: ") + env);
    return static_cast<unsigned>(v);
}

void add_family(CLI::App* cmd, FamilyArgs& f) {
    cmd->add_option("--family", f.family, "family descriptor, e.g. \"defect-pair(m=3)\"")->required();
    cmd->add_option("--n", f.n, "truncation size")->required()->check(CLI::PositiveNumber);
}

void add_classify(CLI::App* cmd, ClassifyArgs& c) {
    cmd->add_option("--threshold", c.threshold, "decay threshold as p/q")->capture_default_str();
    cmd->add_option("--min-points", c.min_points, "decay points required")->capture_default_str();
    cmd->add_option("--window", c.window, "probe window (0 = family default)")->capture_default_str();
    cmd->add_option("--n-list", c.n_list, "ascending truncations for the decay profile")->delimiter(',');
}

void add_metric(CLI::App* cmd, MetricArgs& m) {
    cmd->add_option("--terms", m.terms, "explicit series terms K")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--precision", m.precision, "square roots to 2^-precision (default from MIXEDSYS_PRECISION)")
        ->check(CLI::PositiveNumber);
}

ClassifyOptions classify_options(const ClassifyArgs& c, const Common& common) {
    ClassifyOptions o;
    o.decay_threshold = scalar_from_string(c.threshold);
    if (o.decay_threshold <= 0) throw ParseError("--threshold must be positive");
    o.min_points = c.min_points;
    o.window = c.window;
    o.n_list = c.n_list;
    o.exact.max_bits = common.max_bits;
    return o;
}

MetricOptions metric_options(const MetricArgs& m, const Common& common) {
    MetricOptions o;
    o.terms = m.terms;
    o.precision = m.precision;
    o.exact.max_bits = common.max_bits;
    return o;
}

Json common_config(const Common& c) {
    Json j;
    j["max_bits"] = c.max_bits;
    j["out"] = c.out;
    j["csv"] = c.csv;
    j["decimal"] = c.decimal;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    f << text;
}

/// "e3" or "f2" in the family's coordinates.
SparseVector parse_probe(const SystemFamily& family, const std::string& label) {
    if (label.size() < 2 || (label[0] != 'e' && label[0] != 'f') ||
        !std::all_of(label.begin() + 1, label.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ParseError("probe must look like e3 or f2: " + label);
    return SparseVector::unit(family.coordinate(label[0], std::stoull(label.substr(1))));
}

SystemFamily build(const std::string& descriptor, std::size_t n) { return make_family(parse_family(descriptor), n); }

struct Output {
    Json json;
    std::optional<CsvTable> csv;
    bool ok = true;  // false only for failed oracle suites
};

Output run_construct(const FamilyArgs& f, bool with_vectors, const Common& common) {
    const SystemFamily fam = build(f.family, f.n);
    const std::size_t n = std::min(f.n, fam.size());
    const ExactMatrix b = biorthogonality(fam, n);
    bool identity = true;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (b(j, k) != (j == k ? 1 : 0)) identity = false;

    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["n"] = f.n;
    config["vectors"] = with_vectors;
    Json prov;
    prov["biorthogonal"] = "exact";
    prov["vectors"] = "exact";
    Output out{report_envelope("construct", std::move(config), std::move(prov)), std::nullopt};
    out.json["size"] = n;
    out.json["ambient"] = fam.ambient(n);
    out.json["biorthogonal"] = identity;
    if (with_vectors) {
        Json xs = Json::array(), ds = Json::array();
        for (std::size_t k = 1; k <= n; ++k) {
            xs.push_back(to_json(fam.x(k)));
            ds.push_back(to_json(fam.dual(k)));
        }
        out.json["primal"] = std::move(xs);
        out.json["dual"] = std::move(ds);
    }
    if (!identity) throw InvariantViolation("constructed family is not biorthogonal");

    CsvTable t({"k", "side", "coordinate", "label", "value"});
    for (std::size_t k = 1; k <= n; ++k)
        for (const auto* side : {"x", "dual"})
            for (const auto& e : (side[0] == 'x' ? fam.x(k) : fam.dual(k)).entries())
                t.add({std::to_string(k), side, std::to_string(e.index), fam.coordinate_label(e.index), to_string(e.value)});
    out.csv = std::move(t);
    return out;
}

Json defect_provenance() {
    Json p;
    p["witnesses"] = "exact";
    p["decay.dist_sq"] = "exact";
    p["truncated_defect"] = "exact";
    p["verdict"] = "threshold";
    return p;
}

Output run_defect(const FamilyArgs& f, const std::string& sigma, const ClassifyArgs& c, const Common& common) {
    const SystemFamily fam = build(f.family, f.n);
    const DefectReport r = classify_defect(fam, parse_index_set(sigma), f.n, classify_options(c, common));
    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["sigma"] = sigma;
    config["n"] = f.n;
    config["classify"] = to_json(classify_options(c, common));
    Output out{report_envelope("defect", std::move(config), defect_provenance()), decay_csv(r, common.decimal)};
    out.json["report"] = defect_json(r);
    return out;
}

Output run_sweep(const std::string& family, const std::vector<std::string>& sigmas, const ClassifyArgs& c,
                 const std::vector<std::size_t>& n_grid, const Common& common) {
    if (n_grid.empty()) throw ParseError("--n-grid needs at least one value");
    const std::size_t n_max = *std::max_element(n_grid.begin(), n_grid.end());
    const SystemFamily fam = build(family, n_max);
    std::vector<Set> sets;
    for (const auto& s : sigmas) sets.push_back(parse_index_set(s));

    const ClassifyOptions opts = classify_options(c, common);
    const std::size_t tasks = sets.size() * n_grid.size();
    std::vector<DefectReport> reports(tasks);
    ExceptionSlot slot;
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(tasks);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        slot.run([&] {
            const std::size_t i = static_cast<std::size_t>(t) / n_grid.size();
            const std::size_t k = static_cast<std::size_t>(t) % n_grid.size();
            reports[static_cast<std::size_t>(t)] = classify_defect(fam, sets[i], n_grid[k], opts);
        });
    }
    slot.rethrow();

    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["sigmas"] = sigmas;
    config["n_grid"] = n_grid;
    config["classify"] = to_json(opts);
    Output out{report_envelope("sweep", std::move(config), defect_provenance()), std::nullopt};
    CsvTable t({"sigma", "n", "verdict", "certificate", "truncated_defect", "witness_dim", "predicted"});
    Json rows = Json::array();
    for (const auto& r : reports) {
        rows.push_back(defect_json(r));
        t.add({r.sigma, std::to_string(r.n), r.verdict.to_string(), r.certificate, std::to_string(r.truncated_defect),
               std::to_string(r.witness_dim), r.predicted ? r.predicted->to_string() : ""});
    }
    out.json["reports"] = std::move(rows);
    out.csv = std::move(t);
    return out;
}

Output run_metric(const FamilyArgs& f, const std::vector<std::string>& sigmas, const std::string& which,
                  const MetricArgs& m, const Common& common) {
    if (which != "ds" && which != "dw" && which != "both") throw ParseError("--which must be ds, dw or both");
    const MetricOptions opts = metric_options(m, common);
    const SystemFamily fam = build(f.family, std::max(f.n, opts.terms));
    std::vector<Set> sets;
    for (const auto& s : sigmas) sets.push_back(parse_index_set(s));

    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["sigmas"] = sigmas;
    config["n"] = f.n;
    config["which"] = which;
    config["metric"] = to_json(opts);
    Json prov;
    prov["ds"] = "enclosure";
    prov["dw"] = "enclosure";
    Output out{report_envelope("metric", std::move(config), std::move(prov)), std::nullopt};

    std::vector<std::string> header{"sigma", "tau", "metric", "lo", "hi"};
    if (common.decimal) header.push_back("mid_approx");
    CsvTable t(std::move(header));
    Json rows = Json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i; j < sets.size(); ++j) {
            Json row;
            row["sigma"] = sigmas[i];
            row["tau"] = sigmas[j];
            for (const char* name : {"ds", "dw"}) {
                if (which != "both" && which != name) continue;
                const Interval iv = name[1] == 's' ? metric_ds(fam, sets[i], sets[j], f.n, opts)
                                                   : metric_dw(fam, sets[i], sets[j], f.n, opts);
                row[name] = to_json(iv);
                std::vector<std::string> fields{sigmas[i], sigmas[j], name, to_string(iv.lo), to_string(iv.hi)};
                if (common.decimal) fields.push_back(decimal((iv.lo + iv.hi) / 2));
                t.add(std::move(fields));
            }
            rows.push_back(std::move(row));
        }
    }
    out.json["pairs"] = std::move(rows);
    out.csv = std::move(t);
    return out;
}

Output run_chain(const FamilyArgs& f, const std::string& sigma, std::size_t depth, const std::string& probe,
                 const Common& common) {
    const SystemFamily fam = build(f.family, f.n);
    std::optional<SparseVector> pv;
    if (!probe.empty()) pv = parse_probe(fam, probe);
    ExactOptions exact;
    exact.max_bits = common.max_bits;
    const ChainReport r = intersection_chain(fam, parse_index_set(sigma), depth, f.n, pv, exact);

    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["sigma"] = sigma;
    config["n"] = f.n;
    config["depth"] = depth;
    config["probe"] = probe;
    Json prov;
    prov["dims"] = "exact";
    prov["probe_dist_sq"] = "exact";
    Output out{report_envelope("chain", std::move(config), std::move(prov)), std::nullopt};
    out.json["report"] = chain_json(r);

    std::vector<std::string> header{"m", "h_dim", "intersection_dim"};
    if (pv) header.push_back("probe_dist_sq");
    if (pv && common.decimal) header.push_back("probe_dist_sq_approx");
    CsvTable t(std::move(header));
    for (std::size_t i = 0; i < r.dims.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1), std::to_string(r.h_dims[i]), std::to_string(r.dims[i])};
        if (pv) row.push_back(to_string(r.probe_dist_sq[i]));
        if (pv && common.decimal) row.push_back(decimal(r.probe_dist_sq[i]));
        t.add(std::move(row));
    }
    out.csv = std::move(t);
    return out;
}

Output run_converge(const FamilyArgs& f, const std::string& sigma, const std::string& rule, std::size_t depth,
                    std::size_t window, const std::string& margin, const MetricArgs& m, const Common& common) {
    const MetricOptions opts = metric_options(m, common);
    const SystemFamily fam = build(f.family, std::max({f.n, opts.terms, window}));
    const SequenceRule seq = parse_sequence_rule(rule);
    const Scalar margin_q = scalar_from_string(margin);
    if (margin_q < 0) throw ParseError("--margin must be non-negative");
    const Set s = parse_index_set(sigma);
    SemicontinuityReport r = semicontinuity_probe(fam, s, seq, depth, f.n, opts, margin_q);
    // The probe's own rows carry no proxies; recompute them when asked.
    if (window > 0) r.convergence = convergence_probe(fam, s, seq, depth, f.n, window, opts);

    Json config = common_config(common);
    config["family"] = fam.descriptor();
    config["sigma"] = sigma;
    config["rule"] = seq.name();
    config["n"] = f.n;
    config["depth"] = depth;
    config["window"] = window;
    config["margin"] = to_json(margin_q);
    config["metric"] = to_json(opts);
    Json prov;
    prov["rho"] = "exact";
    prov["prefix"] = "exact";
    prov["ds_to_zero"] = "enclosure";
    prov["proxies"] = "enclosure";
    prov["violation"] = "certified from enclosures";
    Output out{report_envelope("converge", std::move(config), std::move(prov)),
               convergence_csv(r.convergence, common.decimal)};
    out.json["report"] = semicontinuity_json(r);
    return out;
}

Output run_oracle(const std::string& suite, std::size_t instances, std::uint64_t seed, std::size_t max_dim,
                  std::size_t max_chain, const Common& common) {
    Json config = common_config(common);
    config["suite"] = suite;
    config["instances"] = instances;
    config["seed"] = seed;
    config["max_dim"] = max_dim;
    Json prov;
    prov["defects"] = "exact";
    Output out;
    if (suite == "swap") {
        config["max_chain"] = max_chain;
        const SwapSuiteResult r = swap_suite(instances, seed, max_dim, max_chain);
        out.json = report_envelope("oracle", std::move(config), std::move(prov));
        out.json["result"] = swap_suite_json(r);
        out.ok = r.violations == 0;
    } else if (suite == "hereditary") {
        const HereditarySuiteResult r = hereditary_suite(instances, seed, max_dim);
        out.json = report_envelope("oracle", std::move(config), std::move(prov));
        out.json["result"] = hereditary_suite_json(r);
        out.ok = r.nonzero == 0;
    } else {
        throw ParseError("--suite must be swap or hereditary");
    }
    return out;
}

void print_error(std::string_view cls, std::string_view type, std::string_view message) {
    Json e;
    e["error"]["class"] = cls;
    e["error"]["type"] = type;
    e["error"]["message"] = message;
    std::cerr << e.dump() << '\n';
}

int exit_code(ErrorClass c) {
    switch (c) {
    case ErrorClass::Input: return exit_input;
    case ErrorClass::Budget: return exit_budget;
    case ErrorClass::Invariant: return exit_invariant;
    }
    return exit_invariant;
}

std::string_view class_name(ErrorClass c) {
    switch (c) {
    case ErrorClass::Input: return "input";
    case ErrorClass::Budget: return "budget";
    case ErrorClass::Invariant: return "invariant";
    }
    return "invariant";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact experiments on mixed systems of biorthogonal families."};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--threads", common.threads, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--max-bits", common.max_bits, "abort when an entry exceeds this many bits (0 = no limit)");
    app.add_option("--out", common.out, "JSON report path ('-' = stdout)")->capture_default_str();
    app.add_option("--csv", common.csv, "CSV table path");
    app.add_flag("--decimal", common.decimal, "add approximate decimal columns to CSV output");

    FamilyArgs fam;
    ClassifyArgs cls;
    MetricArgs met;
    std::string sigma = "all";
    std::vector<std::string> sigmas;

    auto* construct = app.add_subcommand("construct", "dump a family and check biorthogonality");
    add_family(construct, fam);
    bool no_vectors = false;
    construct->add_flag("--no-vectors", no_vectors, "omit vector entries from the JSON report");

    auto* defect = app.add_subcommand("defect", "certify the defect of one mixed system");
    add_family(defect, fam);
    defect->add_option("--sigma", sigma, "index set expression")->required();
    add_classify(defect, cls);

    auto* sweep = app.add_subcommand("sweep", "defect over a grid of sets and truncations");
    std::string sweep_family;
    std::vector<std::size_t> n_grid;
    sweep->add_option("--family", sweep_family, "family descriptor")->required();
    sweep->add_option("--sigma", sigmas, "index set expression (repeatable)")->required()->take_all();
    sweep->add_option("--n-grid", n_grid, "truncations")->required()->delimiter(',');
    add_classify(sweep, cls);

    auto* metric = app.add_subcommand("metric", "pairwise d_s / d_w enclosures");
    add_family(metric, fam);
    std::string which = "both";
    metric->add_option("--sigma", sigmas, "index set expression (repeatable)")->required()->take_all();
    metric->add_option("--which", which, "ds, dw or both")->capture_default_str();
    add_metric(metric, met);

    auto* chain = app.add_subcommand("chain", "intersection of H over the tail sets");
    add_family(chain, fam);
    std::size_t depth = 10;
    std::string probe;
    chain->add_option("--sigma", sigma, "index set expression")->required();
    chain->add_option("--depth", depth, "number of sets in the chain")->capture_default_str();
    chain->add_option("--probe", probe, "basis vector to track, e.g. e1");

    auto* converge = app.add_subcommand("converge", "convergence and semicontinuity probes");
    add_family(converge, fam);
    std::string rule = "tail", margin = "0";
    std::size_t window = 0;
    converge->add_option("--sigma", sigma, "limit set expression")->required();
    converge->add_option("--rule", rule, "tail, prefix, constant or [set;set;...]")->capture_default_str();
    converge->add_option("--depth", depth, "sequence length")->capture_default_str();
    converge->add_option("--window", window, "pointwise proxies for x_1..x_window")->capture_default_str();
    converge->add_option("--margin", margin, "violation margin as p/q")->capture_default_str();
    add_metric(converge, met);

    auto* oracle = app.add_subcommand("oracle", "randomized property suites with exact oracles");
    std::string suite;
    std::size_t instances = 100, max_dim = 0, max_chain = 3;
    std::uint64_t seed = 1;
    oracle->add_option("--suite", suite, "swap or hereditary")->required();
    oracle->add_option("--instances", instances, "number of random families")->capture_default_str();
    oracle->add_option("--seed", seed, "random seed")->capture_default_str();
    oracle->add_option("--max-dim", max_dim, "largest dimension (default 8 for swap, 6 for hereditary)");
    oracle->add_option("--max-chain", max_chain, "longest swap chain")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("input", "ParseError", e.what());
        return exit_input;
    }

    try {
        set_worker_count(common.threads);
        if (!metric->count("--precision") && !converge->count("--precision")) met.precision = default_precision();

        Output out;
        if (construct->parsed()) out = run_construct(fam, !no_vectors, common);
        else if (defect->parsed()) out = run_defect(fam, sigma, cls, common);
        else if (sweep->parsed()) out = run_sweep(sweep_family, sigmas, cls, n_grid, common);
        else if (metric->parsed()) out = run_metric(fam, sigmas, which, met, common);
        else if (chain->parsed()) out = run_chain(fam, sigma, depth, probe, common);
        else if (converge->parsed()) out = run_converge(fam, sigma, rule, depth, window, margin, met, common);
        else out = run_oracle(suite, instances, seed, max_dim ? max_dim : (suite == "swap" ? 8 : 6), max_chain, common);

        write_text(common.out, out.json.dump(2) + "\n");
        if (!common.csv.empty()) write_text(common.csv, out.csv ? out.csv->str() : throw ParseError("this command has no CSV table"));
        if (!out.ok) {
            print_error("invariant", "OracleFailure", "property suite reported violations");
            return exit_invariant;
        }
        return 0;
    } catch (const Error& e) {
        print_error(class_name(e.error_class()), e.name(), e.what());
        return exit_code(e.error_class());
    } catch (const std::bad_alloc&) {
        print_error("budget", "OutOfMemory", "allocation failed");
        return exit_budget;
    } catch (const std::exception& e) {
        print_error("invariant", "InternalError", e.what());
        return exit_invariant;
    }
}
