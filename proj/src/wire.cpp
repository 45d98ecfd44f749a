#include "fpwb/wire.hpp"

#include <cmath>

#include "fpwb/emit.hpp"
#include "fpwb/float_bits.hpp"
#include "fpwb/parse.hpp"

namespace fpwb::wire {

json hex(double v) { return to_hex(v); }

double parse_hex_or_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.starts_with("0x") || s.starts_with("0X")) return from_hex(s);
    return parse_bound(s);
  }
  throw Error(ErrorCode::BadRequest, "expected a number or hex string");
}

json encode(const Error& e) {
  json err;
  err["code"] = to_string(e.code());
  err["message"] = e.what();
  if (e.span()) {
    err["span"] = {{"offset", e.span()->offset}, {"length", e.span()->length}};
  } else {
    err["span"] = nullptr;
  }
  if (!e.expected().empty()) err["expected"] = e.expected();
  return {{"error", err}};
}

json encode(const Spec& spec) {
  json vars = json::array();
  for (const auto& v : spec.vars) {
    vars.push_back({{"name", v.name},
                    {"lo", hex(v.lo)},
                    {"hi", hex(v.hi)},
                    {"lo_text", format_double(v.lo)},
                    {"hi_text", format_double(v.hi)}});
  }
  json j;
  j["key"] = spec_key(spec);
  j["math"] = emit_math(spec.expr);
  j["fpcore"] = emit_fpcore(spec.expr, spec);
  j["latex"] = emit_latex(spec.expr);
  j["vars"] = std::move(vars);
  j["points"] = spec.points;
  j["seed"] = spec.seed;
  return j;
}

json encode_point(const Sample& sample, std::size_t index) {
  json p;
  for (std::size_t s = 0; s < sample.vars.size(); ++s) {
    p[sample.vars[s]] = hex(sample.points[index][s]);
  }
  return p;
}

json encode(const Sample& sample) {
  json pts = json::array();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    json row = json::array();
    for (double v : sample.points[i]) row.push_back(hex(v));
    pts.push_back(std::move(row));
  }
  json ex = json::array();
  for (double v : sample.exacts) ex.push_back(hex(v));
  json j;
  j["spec_key"] = sample.spec_key;
  j["vars"] = sample.vars;
  j["seed"] = sample.seed;
  j["requested"] = sample.requested;
  j["achieved"] = sample.achieved;
  j["truncated"] = sample.truncated;
  j["points"] = std::move(pts);
  j["exacts"] = std::move(ex);
  return j;
}

json encode_summary(const ErrorReport& report) {
  json j;
  j["spec_key"] = report.spec_key;
  j["average"] = report.average;
  j["worst_index"] = report.worst_index;
  j["worst_bits"] = report.worst_bits;
  return j;
}

json encode(const ErrorReport& report, const Sample& sample) {
  json j = encode_summary(report);
  j["vars"] = sample.vars;
  json pts = json::array();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    json row = json::array();
    for (double v : sample.points[i]) row.push_back(hex(v));
    pts.push_back({{"x", std::move(row)}, {"exact", hex(sample.exacts[i])}, {"bits", report.bits[i]}});
  }
  j["points"] = std::move(pts);
  return j;
}

json encode(const LocalErrorTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json j;
    j["path"] = n.path;
    j["op"] = op_info(n.op).name;
    j["label"] = n.label;
    j["children"] = n.children;
    j["exact"] = hex(n.exact);
    j["float"] = hex(n.float_op);
    j["bits"] = n.local_bits;
    j["taken"] = n.taken;
    j["invalid"] = n.invalid;
    nodes.push_back(std::move(j));
  }
  json out;
  out["precision"] = tree.precision;
  out["worst_node"] = tree.worst_node();
  out["nodes"] = std::move(nodes);
  return out;
}

json encode(const Step& step) {
  json j;
  j["rule"] = step.rule;
  j["path"] = step.path;
  j["before"] = emit_fpcore_body(step.before);
  j["after"] = emit_fpcore_body(step.after);
  j["before_math"] = emit_math(step.before);
  j["after_math"] = emit_math(step.after);
  return j;
}

json encode(const Derivation& derivation) {
  json steps = json::array();
  for (const auto& s : derivation.steps) steps.push_back(encode(s));
  return steps;
}

json encode(const Candidate& c, const std::string& current_spec_key) {
  json j;
  j["id"] = c.id;
  j["math"] = emit_math(c.expr);
  j["fpcore"] = emit_fpcore_body(c.expr);
  j["latex"] = emit_latex(c.expr);
  j["size"] = c.expr.size();
  j["provenance"] = to_string(c.provenance);
  j["visible"] = c.visible;
  j["duplicate_of"] = c.duplicate_of ? json(*c.duplicate_of) : json();
  j["source"] = c.source ? json(*c.source) : json();
  j["note"] = c.note;
  bool fresh = c.report && c.report->spec_key == current_spec_key;
  j["stale"] = !fresh;
  j["average"] = c.report ? json(c.report->average) : json();
  j["derivation"] = encode(c.derivation);
  return j;
}

json encode_table(const SessionSnapshot& s) {
  json cands = json::array();
  for (const auto& c : s.candidates) cands.push_back(encode(c, s.sample->spec_key));
  json j;
  j["session_id"] = s.id;
  j["spec"] = encode(s.spec);
  j["sample"] = {{"spec_key", s.sample->spec_key},
                 {"requested", s.sample->requested},
                 {"achieved", s.sample->achieved},
                 {"truncated", s.sample->truncated}};
  j["candidates"] = std::move(cands);
  return j;
}

json encode(const JobStatus& job, const SessionSnapshot* session) {
  json j;
  j["job_id"] = job.id;
  j["session_id"] = job.session_id;
  j["status"] = to_string(job.state);
  j["timed_out"] = job.timed_out;
  if (job.state == JobState::Failed) {
    j["error"] = {{"code", job.error_code}, {"message", job.error_message}};
  }
  if (job.state == JobState::Done) {
    json results = json::array();
    if (session) {
      for (auto id : job.added) {
        for (const auto& c : session->candidates) {
          if (c.id == id) results.push_back(encode(c, session->sample->spec_key));
        }
      }
    }
    j["results"] = std::move(results);
  }
  return j;
}

json encode(const Suggestion& s) {
  json j;
  j["math"] = emit_math(s.expr);
  j["fpcore"] = emit_fpcore_body(s.expr);
  j["size"] = s.expr.size();
  j["average"] = s.report.average;
  j["derivation"] = encode(s.derivation);
  return j;
}

json encode(const RegimeResult& r, const Sample& sample, const std::string& var) {
  const std::size_t slot = sample.slot(var);
  json segs = json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"candidate", s.candidate},
                    {"from", hex(sample.points[r.order[s.first]][slot])},
                    {"to", hex(sample.points[r.order[s.last]][slot])},
                    {"points", s.last - s.first + 1}});
  }
  json th = json::array();
  for (double t : r.thresholds) th.push_back(hex(t));
  json j;
  j["var"] = var;
  j["math"] = emit_math(r.expr);
  j["fpcore"] = emit_fpcore_body(r.expr);
  j["segments"] = std::move(segs);
  j["thresholds"] = std::move(th);
  j["cost"] = r.cost;
  return j;
}

Point decode_point(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadRequest, "point must be an object");
  Point p;
  for (const auto& [k, v] : j.items()) p[k] = parse_hex_or_number(v);
  return p;
}

std::vector<VarRange> decode_ranges(const json& j) {
  std::vector<VarRange> out;
  auto bound = [](const json& v) { return parse_hex_or_number(v); };
  if (j.is_array()) {
    for (const auto& r : j) {
      if (!r.is_object() || !r.contains("name")) {
        throw Error(ErrorCode::BadRequest, "range entries need a name");
      }
      VarRange v{r.at("name").get<std::string>()};
      if (r.contains("lo")) v.lo = bound(r.at("lo"));
      if (r.contains("hi")) v.hi = bound(r.at("hi"));
      out.push_back(std::move(v));
    }
  } else if (j.is_object()) {
    for (const auto& [k, r] : j.items()) {
      if (!r.is_array() || r.size() != 2) {
        throw Error(ErrorCode::BadRequest, "range for '" + k + "' must be [lo, hi]");
      }
      out.push_back({k, bound(r[0]), bound(r[1])});
    }
  } else {
    throw Error(ErrorCode::BadRequest, "ranges must be an array or object");
  }
  return out;
}

Expr decode_fpcore_body(const std::string& body, const std::vector<std::string>& vars) {
  std::string text = "(FPCore (";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) text += ' ';
    text += vars[i];
  }
  text += ") " + body + ")";
  return parse_fpcore(text).expr;
}

Derivation decode_derivation(const json& j, const std::vector<std::string>& vars) {
  Derivation d;
  if (j.is_null()) return d;
  if (!j.is_array()) throw Error(ErrorCode::BadRequest, "derivation must be an array");
  for (const auto& s : j) {
    Step step;
    step.rule = s.at("rule").get<std::string>();
    step.path = s.at("path").get<Path>();
    step.before = decode_fpcore_body(s.at("before").get<std::string>(), vars);
    step.after = decode_fpcore_body(s.at("after").get<std::string>(), vars);
    d.steps.push_back(std::move(step));
  }
  return d;
}

}  // namespace fpwb::wire
