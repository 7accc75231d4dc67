#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "convecon/closed_form.hpp"
#include "convecon/oracle.hpp"
#include "convecon/sessions.hpp"
#include "convecon/statics.hpp"

// File formats: parameter/grid/region JSON, session JSON Lines, sweep CSV,
// and the JSON documents printed by the command-line tool.

namespace convecon::io {

using nlohmann::json;

/// {"alpha", "beta", "gamma1", "gamma2", "c_query", "c_feedback",
/// "c_assess"}; every field required, unknown fields rejected.
ValidatedParams params_from_json(const json& j);
json params_to_json(const ValidatedParams& p);

/// {"min", "max", "points", "refinements"}; missing fields keep `base`.
GridSpec grid_from_json(const json& j, const GridSpec& base = {});
json grid_to_json(const GridSpec& g);

/// {"alpha": [lo, hi], ...}; missing ranges keep the defaults.
Region region_from_json(const json& j);
json region_to_json(const Region& r);

json to_json(const Strategy& s);
json to_json(const KktReport& k);
json to_json(const ClosedFormSolution& s);
json to_json(const OptimalStrategy& s);
json to_json(const ClaimAuditReport& r);
json to_json(const EstimationResult& r);
json to_json(const Recommendation& r);

json to_json(const SessionLog& log);
SessionLog session_from_json(const json& j);

void write_jsonl(std::ostream& os, const std::vector<SessionLog>& logs);
std::vector<SessionLog> read_jsonl(std::istream& is);

/// Header row, then one row per sweep value; empty cells for missing values.
void write_csv(std::ostream& os, const SweepTable& t);

/// Aligned table, one claim per row.
void write_audit_table(std::ostream& os, const ClaimAuditReport& r);

/// "path: value" lines carrying exactly the numbers of the JSON document.
void write_text(std::ostream& os, const json& j);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

json read_json_file(const std::filesystem::path& path);

}  // namespace convecon::io
