#include "fpwb/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <functional>

#include "fpwb/emit.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/rewriter.hpp"
#include "fpwb/wire.hpp"

namespace fpwb {

using wire::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::JobNotFound: return 404;
    case ErrorCode::Timeout: return 408;
    case ErrorCode::EmptySample:
    case ErrorCode::InvalidPoint:
    case ErrorCode::Degenerate:
    case ErrorCode::Divergence: return 422;
    case ErrorCode::Internal: return 500;
    default: return 400;
  }
}

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    parts.push_back(path.substr(i, j - i));
    i = j;
  }
  return parts;
}

std::uint64_t parse_id(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw Error(ErrorCode::NotFound, "no candidate '" + std::string(s) + "'");
  }
  return v;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const json& j, const char* name, T fallback) {
  if (!j.contains(name) || j.at(name).is_null()) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::BadRequest, std::string("field '") + name + "' has the wrong type");
  }
}

std::string required_string(const json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_string()) {
    throw Error(ErrorCode::BadRequest, std::string("missing string field '") + name + "'");
  }
  return j.at(name).get<std::string>();
}

Spec spec_from_request(const json& req) {
  std::vector<VarRange> ranges;
  if (req.contains("ranges")) ranges = wire::decode_ranges(req.at("ranges"));
  Spec spec;
  if (req.contains("fpcore")) {
    spec = parse_fpcore(required_string(req, "fpcore"));
    spec = spec.with_ranges(ranges);
  } else if (req.contains("math") || req.contains("mathjson")) {
    std::string text = required_string(req, req.contains("math") ? "math" : "mathjson");
    Expr e = parse_math(text);
    validate(e);
    spec = make_spec(e, ranges, kDefaultPoints, default_seed());
  } else {
    throw Error(ErrorCode::BadRequest, "request needs 'fpcore' or 'math'");
  }
  spec.points = field<std::size_t>(req, "n", field<std::size_t>(req, "points", spec.points));
  spec.seed = field<std::uint64_t>(req, "seed", spec.seed);
  if (spec.points == 0) throw Error(ErrorCode::BadRequest, "n must be positive");
  return spec;
}

// Candidate text, as math or as an FPCore body or full form, checked
// against the session's variables.
Expr expr_from_request(const json& req, const Spec& spec) {
  Expr e;
  auto vars = spec.var_names();
  if (req.contains("fpcore")) {
    std::string text = required_string(req, "fpcore");
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
      trimmed.remove_prefix(1);
    }
    e = trimmed.starts_with("(FPCore") ? parse_fpcore(text).expr
                                       : wire::decode_fpcore_body(text, vars);
  } else if (req.contains("math")) {
    e = parse_math(required_string(req, "math"));
  } else {
    throw Error(ErrorCode::BadRequest, "request needs 'fpcore' or 'math'");
  }
  validate(e);
  for (const auto& v : free_variables(e)) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
      throw Error(ErrorCode::UnboundVariable,
                  "variable '" + v + "' is not an input of this session");
    }
  }
  return e;
}

// "math->fpcore", "math→fpcore", "math_to_fpcore" or explicit from/to.
std::pair<std::string, std::string> translation_direction(const json& req) {
  if (req.contains("from") && req.contains("to")) {
    return {required_string(req, "from"), required_string(req, "to")};
  }
  std::string d = required_string(req, "direction");
  for (std::string_view sep : {"->", "\xE2\x86\x92", "_to_", "2"}) {
    if (auto p = d.find(sep); p != std::string::npos) {
      return {d.substr(0, p), d.substr(p + sep.size())};
    }
  }
  throw Error(ErrorCode::BadRequest, "direction must look like 'math->fpcore'");
}

json rule_catalog() {
  json rules = json::array();
  for (const auto& r : rule_db()) {
    json j;
    j["name"] = r.name;
    j["lhs"] = emit_fpcore_body(r.lhs);
    j["rhs"] = emit_fpcore_body(r.rhs);
    j["soundness"] = r.soundness == Soundness::ExactIdentity ? "exact" : "guarded";
    if (r.guard) {
      j["guard"] = {{"term", emit_fpcore_body(r.guard->term)},
                    {"bound", wire::hex(r.guard->bound)},
                    {"at_least", r.guard->at_least}};
    }
    j["description"] = r.description;
    rules.push_back(std::move(j));
  }
  return {{"rules", std::move(rules)}};
}

}  // namespace

ApiResponse ApiRouter::dispatch(std::string_view method, std::string_view path,
                                std::string_view body) {
  auto ok = [](json j, int status = 200) { return ApiResponse{status, j.dump()}; };
  auto p = split_path(path);
  auto is = [&](std::initializer_list<std::string_view> shape) {
    if (p.size() != shape.size()) return false;
    std::size_t i = 0;
    for (auto s : shape) {
      if (s != "*" && s != p[i]) return false;
      ++i;
    }
    return true;
  };
  auto sid = [&] { return std::string(p[2]); };
  auto cid = [&] { return parse_id(p[4]); };
  auto table_of = [&](const std::string& id) { return wire::encode_table(bench_.snapshot(id)); };

  try {
    if (p.empty() || p[0] != "api") throw Error(ErrorCode::NotFound, "no such endpoint");
    const bool get = method == "GET";
    const bool post = method == "POST";

    if (post && is({"api", "sessions"})) {
      std::string id = bench_.create_session(spec_from_request(parse_body(body)));
      return ok({{"session_id", id}, {"table", table_of(id)}}, 201);
    }
    if (post && is({"api", "sessions", "load"})) {
      if (!snapshot_dir_) throw Error(ErrorCode::NotFound, "snapshots are not enabled");
      std::string name = required_string(parse_body(body), "session_id");
      if (name.find_first_of("/\\.") != std::string::npos) {
        throw Error(ErrorCode::BadRequest, "invalid session id");
      }
      std::string id = bench_.load(*snapshot_dir_ / (name + ".json"));
      return ok({{"session_id", id}, {"table", table_of(id)}});
    }
    if (get && (is({"api", "sessions", "*"}) || is({"api", "sessions", "*", "table"}))) {
      return ok(table_of(sid()));
    }
    if (get && is({"api", "sessions", "*", "sample"})) {
      return ok(wire::encode(*bench_.snapshot(sid()).sample));
    }
    if (post && is({"api", "sessions", "*", "candidates"})) {
      auto req = parse_body(body);
      Expr e = expr_from_request(req, bench_.snapshot(sid()).spec);
      Candidate c = bench_.add_candidate(sid(), e);
      auto snap = bench_.snapshot(sid());
      return ok({{"candidate", wire::encode(c, snap.sample->spec_key)}}, 201);
    }
    if (post && is({"api", "sessions", "*", "estimate"})) {
      auto req = parse_body(body);
      Expr e = expr_from_request(req, bench_.snapshot(sid()).spec);
      ErrorReport r = bench_.estimate(sid(), e);
      json j = wire::encode_summary(r);
      j["math"] = emit_math(e);
      j["latex"] = emit_latex(e);
      j["fpcore"] = emit_fpcore_body(e);
      return ok(j);
    }
    if (post && is({"api", "sessions", "*", "range"})) {
      auto req = parse_body(body);
      if (!req.contains("ranges")) throw Error(ErrorCode::BadRequest, "missing 'ranges'");
      auto snap = bench_.set_range(sid(), wire::decode_ranges(req.at("ranges")));
      return ok({{"table", wire::encode_table(snap)}});
    }
    if (get && is({"api", "sessions", "*", "candidates", "*", "errors"})) {
      auto [report, sample] = bench_.errors(sid(), cid());
      return ok(wire::encode(*report, *sample));
    }
    if (post && is({"api", "sessions", "*", "candidates", "*", "localerror"})) {
      auto req = parse_body(body);
      if (!req.contains("point")) throw Error(ErrorCode::BadRequest, "missing 'point'");
      return ok(wire::encode(bench_.local_error(sid(), cid(), wire::decode_point(req.at("point")))));
    }
    if (post && is({"api", "sessions", "*", "candidates", "*", "visibility"})) {
      auto req = parse_body(body);
      if (!req.contains("visible") || !req.at("visible").is_boolean()) {
        throw Error(ErrorCode::BadRequest, "missing boolean 'visible'");
      }
      Candidate c = bench_.set_visible(sid(), cid(), req.at("visible").get<bool>());
      auto snap = bench_.snapshot(sid());
      return ok({{"candidate", wire::encode(c, snap.sample->spec_key)}});
    }
    if (post && is({"api", "sessions", "*", "suggest"})) {
      auto req = parse_body(body);
      if (!req.contains("start_cid")) throw Error(ErrorCode::BadRequest, "missing 'start_cid'");
      std::optional<std::size_t> k;
      std::optional<std::chrono::milliseconds> budget;
      if (req.contains("k")) k = field<std::size_t>(req, "k", 5);
      if (req.contains("budget_ms")) {
        budget = std::chrono::milliseconds(field<std::int64_t>(req, "budget_ms", 20000));
      }
      std::string job = bench_.run_suggest(sid(), field<std::uint64_t>(req, "start_cid", 0), k, budget);
      return ok({{"job_id", job}}, 202);
    }
    if (post && (is({"api", "sessions", "*", "regimes"}) || is({"api", "sessions", "*", "combine"}))) {
      auto req = parse_body(body);
      auto ids = field<std::vector<std::uint64_t>>(req, "candidates", {});
      auto spec = bench_.snapshot(sid()).spec;
      std::string var = field<std::string>(req, "var", spec.vars.empty() ? "" : spec.vars[0].name);
      Candidate c = bench_.combine(sid(), ids, var, field<std::size_t>(req, "max_branches", 3),
                                   field<double>(req, "split_penalty", 1.0));
      auto snap = bench_.snapshot(sid());
      return ok({{"candidate", wire::encode(c, snap.sample->spec_key)}});
    }
    if (post && is({"api", "sessions", "*", "snapshot"})) {
      if (!snapshot_dir_) throw Error(ErrorCode::NotFound, "snapshots are not enabled");
      bench_.save(sid(), *snapshot_dir_ / (sid() + ".json"));
      return ok({{"session_id", sid()}, {"saved", true}});
    }
    if (get && is({"api", "jobs", "*"})) {
      JobStatus st = bench_.poll_job(std::string(p[2]));
      if (st.state == JobState::Done) {
        auto snap = bench_.snapshot(st.session_id);
        return ok(wire::encode(st, &snap));
      }
      return ok(wire::encode(st, nullptr));
    }
    if (post && is({"api", "jobs", "*", "cancel"})) {
      return ok(wire::encode(bench_.cancel_job(std::string(p[2])), nullptr));
    }
    if (post && is({"api", "translate"})) {
      auto req = parse_body(body);
      auto [from, to] = translation_direction(req);
      return ok({{"text", translate(from, to, required_string(req, "text"))}});
    }
    if (get && is({"api", "rules"})) return ok(rule_catalog());
    throw Error(ErrorCode::NotFound,
                "no endpoint for " + std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return {http_status(e.code()), wire::encode(e).dump()};
  } catch (const std::exception& e) {
    return {500, wire::encode(Error(ErrorCode::Internal, e.what())).dump()};
  }
}

bool serve(Workbench& bench, const ServeOptions& options) {
  ApiRouter router(bench, options.snapshot_dir);
  httplib::Server server;
  server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  auto handle = [&router](const httplib::Request& req, httplib::Response& res) {
    ApiResponse r = router.dispatch(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/api/.*)", handle);
  server.Post(R"(/api/.*)", handle);
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  if (options.static_dir && !server.set_mount_point("/", options.static_dir->string())) {
    return false;
  }
  return server.listen(options.host, options.port);
}

}  // namespace fpwb
