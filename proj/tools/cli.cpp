#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fpwb/analysis.hpp"
#include "fpwb/emit.hpp"
#include "fpwb/float_bits.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/regimes.hpp"
#include "fpwb/rewriter.hpp"
#include "fpwb/sampler.hpp"
#include "fpwb/server.hpp"
#include "fpwb/wire.hpp"

namespace {

using namespace fpwb;
using wire::json;

struct Input {
  std::string expr;
  std::string fpcore_file;
  std::vector<std::string> ranges;
  std::size_t points = kDefaultPoints;
  std::optional<std::uint64_t> seed;
  std::string format = "table";
};

void add_input_flags(CLI::App* cmd, Input& in, bool with_sampling = true) {
  auto* e = cmd->add_option("--expr", in.expr, "Expression in math syntax");
  auto* f = cmd->add_option("--fpcore", in.fpcore_file, "File holding one FPCore form")
                ->check(CLI::ExistingFile);
  e->excludes(f);
  if (with_sampling) {
    cmd->add_option("--range", in.ranges, "Input range NAME=LO:HI (repeatable)");
    cmd->add_option("--points", in.points, "Sample size")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", in.seed, "Sampling seed (default: FPWB_SEED or 42)");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Spec build_spec(const Input& in) {
  std::vector<VarRange> ranges;
  for (const auto& r : in.ranges) ranges.push_back(parse_range_flag(r));
  Spec spec;
  if (!in.fpcore_file.empty()) {
    spec = parse_fpcore(read_file(in.fpcore_file)).with_ranges(ranges);
    spec.points = in.points;
    if (in.seed) spec.seed = *in.seed;
  } else if (!in.expr.empty()) {
    Expr e = parse_math(in.expr);
    validate(e);
    spec = make_spec(e, ranges, in.points, in.seed.value_or(default_seed()));
  } else {
    throw Error(ErrorCode::BadRequest, "give exactly one of --expr or --fpcore");
  }
  validate_spec(spec);
  return spec;
}

Expr build_expr(const Input& in) {
  if (!in.fpcore_file.empty()) return parse_fpcore(read_file(in.fpcore_file)).expr;
  if (in.expr.empty()) throw Error(ErrorCode::BadRequest, "give exactly one of --expr or --fpcore");
  Expr e = parse_math(in.expr);
  validate(e);
  return e;
}

std::string fmt(double v) { return format_double(v); }

std::string point_text(const Sample& s, std::size_t i) {
  std::string out;
  for (std::size_t k = 0; k < s.vars.size(); ++k) {
    if (k) out += ", ";
    out += s.vars[k] + "=" + fmt(s.points[i][k]);
  }
  return out;
}

void print_report(const Spec& spec, const Sample& smp, const ErrorReport& r,
                  const std::string& format) {
  if (format == "json") {
    json j;
    j["spec"] = wire::encode(spec);
    j["report"] = wire::encode(r, smp);
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    std::cout << "index";
    for (const auto& v : smp.vars) std::cout << "," << v << "," << v << "_hex";
    std::cout << ",exact,exact_hex,bits\n";
    for (std::size_t i = 0; i < smp.size(); ++i) {
      std::cout << i;
      for (double x : smp.points[i]) std::cout << "," << fmt(x) << "," << to_hex(x);
      std::cout << "," << fmt(smp.exacts[i]) << "," << to_hex(smp.exacts[i]) << ","
                << fmt(r.bits[i]) << "\n";
    }
    return;
  }
  std::printf("expression  %s\n", emit_math(spec.expr).c_str());
  for (const auto& v : spec.vars) {
    std::printf("range       %s in [%s, %s]\n", v.name.c_str(), fmt(v.lo).c_str(),
                fmt(v.hi).c_str());
  }
  std::printf("points      %zu of %zu (seed %llu)%s\n", smp.achieved, smp.requested,
              static_cast<unsigned long long>(smp.seed), smp.truncated ? " truncated" : "");
  std::printf("average     %.3f bits\n", r.average);
  if (smp.size() > 0) {
    std::printf("worst       %.3f bits at %s\n", r.worst_bits,
                point_text(smp, r.worst_index).c_str());
  }
}

int cmd_analyze(const Input& in) {
  Spec spec = build_spec(in);
  Sample smp = sample(spec);
  ErrorReport r = analyze(spec.expr, smp);
  print_report(spec, smp, r, in.format);
  return 0;
}

int cmd_suggest(const Input& in, std::size_t k, std::int64_t budget_ms) {
  Spec spec = build_spec(in);
  Sample smp = sample(spec);
  SuggestOptions opts;
  opts.k = k;
  opts.budget = std::chrono::milliseconds(budget_ms);
  SuggestResult res = suggest(spec, smp, spec.expr, opts);
  if (res.timed_out) {
    std::cerr << "warning: search budget exceeded; results are partial\n";
  }
  if (in.format == "json") {
    json cands = json::array();
    for (const auto& s : res.candidates) cands.push_back(wire::encode(s));
    json j;
    j["spec"] = wire::encode(spec);
    j["start_average"] = analyze(spec.expr, smp).average;
    j["candidates"] = std::move(cands);
    j["timed_out"] = res.timed_out;
    j["explored"] = res.explored;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  if (in.format == "csv") {
    std::cout << "rank,average,size,math\n";
    for (std::size_t i = 0; i < res.candidates.size(); ++i) {
      const auto& s = res.candidates[i];
      std::string m = emit_math(s.expr);
      std::cout << i + 1 << "," << fmt(s.report.average) << "," << s.expr.size() << ",\"" << m
                << "\"\n";
    }
    return 0;
  }
  std::printf("start  %8.3f bits  %s\n", analyze(spec.expr, smp).average,
              emit_math(spec.expr).c_str());
  for (std::size_t i = 0; i < res.candidates.size(); ++i) {
    const auto& s = res.candidates[i];
    std::printf("%-5zu  %8.3f bits  %s\n", i + 1, s.report.average, emit_math(s.expr).c_str());
    for (const auto& st : s.derivation.steps) {
      std::printf("         %-22s %s\n", st.rule.c_str(), emit_math(st.after).c_str());
    }
  }
  std::printf("explored %zu expressions%s\n", res.explored, res.timed_out ? " (timed out)" : "");
  return 0;
}

int cmd_localerror(const Input& in, const std::vector<std::string>& point_flags) {
  Expr e = build_expr(in);
  Point p;
  for (const auto& f : point_flags) {
    auto eq = f.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadRequest, "--point expects NAME=VALUE");
    std::string v = f.substr(eq + 1);
    p[f.substr(0, eq)] = v.starts_with("0x") ? from_hex(v) : parse_bound(v);
  }
  LocalErrorTree t = local_error(e, p);
  if (in.format == "json") {
    std::cout << wire::encode(t).dump(2) << "\n";
    return 0;
  }
  if (in.format == "csv") {
    std::cout << "node,depth,op,label,exact,exact_hex,float,float_hex,bits,taken\n";
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
      const auto& n = t.nodes[i];
      std::cout << i << "," << n.path.size() << "," << op_info(n.op).name << ",\"" << n.label
                << "\"," << fmt(n.exact) << "," << to_hex(n.exact) << "," << fmt(n.float_op)
                << "," << to_hex(n.float_op) << "," << fmt(n.local_bits) << ","
                << (n.taken ? 1 : 0) << "\n";
    }
    return 0;
  }
  std::printf("%-32s %24s %24s %7s\n", "node", "exact", "float", "bits");
  for (const auto& n : t.nodes) {
    std::string label = std::string(2 * n.path.size(), ' ') + n.label;
    if (!n.taken) label += " (untaken)";
    std::printf("%-32s %24s %24s %7.2f\n", label.c_str(), fmt(n.exact).c_str(),
                fmt(n.float_op).c_str(), n.local_bits);
  }
  std::printf("worst node: %s (precision %d)\n", t.nodes[t.worst_node()].label.c_str(),
              t.precision);
  return 0;
}

int cmd_regimes(const Input& in, const std::vector<std::string>& cands, std::string var,
                std::size_t max_branches, double penalty) {
  Spec spec = build_spec(in);
  Sample smp = sample(spec);
  std::vector<Expr> exprs;
  for (const auto& c : cands) {
    Expr e = parse_math(c);
    validate(e);
    exprs.push_back(e);
  }
  if (exprs.empty()) throw Error(ErrorCode::BadRequest, "give at least one --candidate");
  if (var.empty()) var = spec.vars.at(0).name;
  std::vector<std::vector<double>> bits;
  for (const auto& e : exprs) bits.push_back(analyze(e, smp).bits);
  RegimeResult r = infer_regimes(exprs, bits, smp, {var, max_branches, penalty});
  ErrorReport combined = analyze(r.expr, smp);
  if (in.format == "json") {
    json j = wire::encode(r, smp, var);
    j["average"] = combined.average;
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    double avg = 0.0;
    for (double b : bits[i]) avg += b;
    std::printf("candidate %zu  %8.3f bits  %s\n", i + 1, bits[i].empty() ? 0.0 : avg / bits[i].size(),
                emit_math(exprs[i]).c_str());
  }
  std::printf("combined     %8.3f bits  %s\n", combined.average, emit_math(r.expr).c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Floating-point accuracy workbench"};
  app.require_subcommand(1);
  Input in;

  auto* analyze_cmd = app.add_subcommand("analyze", "Per-point error of an expression");
  add_input_flags(analyze_cmd, in);
  analyze_cmd->add_option("--format", in.format)->check(CLI::IsMember({"table", "json", "csv"}));

  std::size_t k = 5;
  std::int64_t budget_ms = 20000;
  auto* suggest_cmd = app.add_subcommand("suggest", "Search for more accurate rewritings");
  add_input_flags(suggest_cmd, in);
  suggest_cmd->add_option("--k", k, "Number of suggestions")->check(CLI::PositiveNumber);
  suggest_cmd->add_option("--budget", budget_ms, "Search budget in milliseconds");
  suggest_cmd->add_option("--format", in.format)->check(CLI::IsMember({"table", "json", "csv"}));

  std::vector<std::string> point_flags;
  auto* local_cmd = app.add_subcommand("localerror", "Per-operation error at one point");
  add_input_flags(local_cmd, in, false);
  local_cmd->add_option("--point", point_flags, "Input value NAME=VALUE (repeatable)")
      ->required();
  local_cmd->add_option("--format", in.format)->check(CLI::IsMember({"table", "json", "csv"}));

  std::string from = "math", to = "fpcore", text;
  auto* translate_cmd = app.add_subcommand("translate", "Convert between expression syntaxes");
  translate_cmd->add_option("--from", from)->check(CLI::IsMember({"math", "fpcore"}));
  translate_cmd->add_option("--to", to)->check(CLI::IsMember({"math", "fpcore", "latex"}));
  translate_cmd->add_option("text", text, "Expression text")->required();

  std::vector<std::string> cands;
  std::string var;
  std::size_t max_branches = 3;
  double penalty = 1.0;
  auto* regimes_cmd = app.add_subcommand("regimes", "Combine candidates by input range");
  add_input_flags(regimes_cmd, in);
  regimes_cmd->add_option("--candidate", cands, "Candidate expression (repeatable)")->required();
  regimes_cmd->add_option("--var", var, "Variable to split on");
  regimes_cmd->add_option("--max-branches", max_branches)->check(CLI::PositiveNumber);
  regimes_cmd->add_option("--split-penalty", penalty);
  regimes_cmd->add_option("--format", in.format)->check(CLI::IsMember({"table", "json"}));

  ServeOptions serve_opts;
  std::string static_dir, snapshot_dir;
  std::size_t workers = 2;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--host", serve_opts.host);
  serve_cmd->add_option("--port", serve_opts.port)->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--static", static_dir, "Directory of UI files to serve at /")
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--snapshot-dir", snapshot_dir, "Directory for session snapshots")
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--workers", workers, "Suggestion worker threads")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--cors-origin", serve_opts.cors_origin);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(in);
    if (*suggest_cmd) return cmd_suggest(in, k, budget_ms);
    if (*local_cmd) return cmd_localerror(in, point_flags);
    if (*translate_cmd) {
      std::cout << translate(from, to, text) << "\n";
      return 0;
    }
    if (*regimes_cmd) return cmd_regimes(in, cands, var, max_branches, penalty);
    if (*serve_cmd) {
      if (!static_dir.empty()) serve_opts.static_dir = static_dir;
      if (!snapshot_dir.empty()) serve_opts.snapshot_dir = snapshot_dir;
      WorkbenchOptions wopts;
      wopts.workers = workers;
      Workbench bench(wopts);
      std::cerr << "listening on http://" << serve_opts.host << ":" << serve_opts.port << "\n";
      if (!serve(bench, serve_opts)) {
        std::cerr << "error: cannot listen on " << serve_opts.host << ":" << serve_opts.port
                  << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::Internal ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
