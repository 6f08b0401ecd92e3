#ifndef MIXEDSYS_REPORT_HPP
#define MIXEDSYS_REPORT_HPP

#include "mixedsys/defect_lab.hpp"
#include "mixedsys/projector_topology.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace mixedsys {

using Json = nlohmann::ordered_json;

/// Bumped whenever a field of any report or CSV table changes meaning.
inline constexpr int report_schema_version = 1;

std::string_view tool_version();

// Exact rationals are "p/q" strings; enclosures are ["lo", "hi"] pairs.
Json to_json(const Scalar& q);
Json to_json(const Interval& iv);
Json to_json(const ExtCount& c);
/// [[coordinate, "p/q"], ...] in ascending coordinate order.
Json to_json(const SparseVector& v);
Json to_json(const ClassifyOptions& opts);
Json to_json(const MetricOptions& opts);

/// {"tool", "version", "schema", "command", "config", "provenance"}. The
/// provenance object maps report fields to "exact" or "enclosure".
Json report_envelope(std::string_view command, Json config, Json provenance);

Json defect_json(const DefectReport& r);
Json chain_json(const ChainReport& r);
Json convergence_json(const ConvergenceReport& r);
Json semicontinuity_json(const SemicontinuityReport& r);
Json swap_suite_json(const SwapSuiteResult& r);
Json hereditary_suite_json(const HereditarySuiteResult& r);

/// Minimal CSV writer: header row then data rows, '\n' line ends, fields
/// quoted only when they contain ',', '"' or a newline.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::vector<std::string> row);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Approximate decimal for the optional "*_approx" CSV columns.
std::string decimal(const Scalar& q);

/// probe,probe_label,n,dist_sq[,dist_sq_approx]
CsvTable decay_csv(const DefectReport& r, bool with_decimal);
/// m,sigma_m,rho,prefix,ds_lo,ds_hi[,ds_mid_approx]
CsvTable convergence_csv(const ConvergenceReport& r, bool with_decimal);

} // namespace mixedsys

#endif
