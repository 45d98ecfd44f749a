#pragma once

// JSON encodings shared by the HTTP API, the CLI and session snapshots.
// Binary64 values that must survive exactly are hex bit patterns.

#include <json.hpp>

#include "fpwb/analysis.hpp"
#include "fpwb/error.hpp"
#include "fpwb/regimes.hpp"
#include "fpwb/rewriter.hpp"
#include "fpwb/sampler.hpp"
#include "fpwb/session.hpp"
#include "fpwb/spec.hpp"

namespace fpwb::wire {

using json = nlohmann::ordered_json;

json hex(double v);
double parse_hex_or_number(const json& v);

json encode(const Error& e);
json encode(const Spec& spec);
json encode_point(const Sample& sample, std::size_t index);
json encode(const Sample& sample);
json encode(const ErrorReport& report, const Sample& sample);
json encode_summary(const ErrorReport& report);
json encode(const LocalErrorTree& tree);
json encode(const Step& step);
json encode(const Derivation& derivation);
json encode(const Candidate& c, const std::string& current_spec_key);
json encode_table(const SessionSnapshot& s);
json encode(const JobStatus& job, const SessionSnapshot* session);
json encode(const Suggestion& s);
json encode(const RegimeResult& r, const Sample& sample, const std::string& var);

/// {"x": "0x..." | number | "1e-3"} to a Point.
Point decode_point(const json& j);
/// [{"name": "x", "lo": ..., "hi": ...}] or {"x": [lo, hi]}.
std::vector<VarRange> decode_ranges(const json& j);
Derivation decode_derivation(const json& j, const std::vector<std::string>& vars);

/// Expression text in FPCore body form, read back against `vars`.
Expr decode_fpcore_body(const std::string& body, const std::vector<std::string>& vars);

}  // namespace fpwb::wire
