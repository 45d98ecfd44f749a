#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/rewriter.hpp"

namespace fpwb {

std::vector<Step> one_step_rewrites(const Expr& e, const Sample* sample) {
  std::vector<Step> out;
  for (const Path& path : all_paths(e)) {
    const Expr& node = subexpr_at(e, path);
    if (node.is_boolean()) continue;
    for (const RewriteRule& rule : rule_db()) {
      std::optional<Expr> after;
      if (rule.name == kConstFold) {
        after = fold_constants(e, path);
      } else {
        auto b = match_pattern(rule.lhs, node);
        if (!b) continue;
        if (rule.guard && (!sample || !guard_holds(rule, *b, *sample))) continue;
        after = replace_at(e, path, instantiate(rule.rhs, *b));
      }
      if (!after || *after == e) continue;
      out.push_back(Step{rule.name, path, e, std::move(*after)});
    }
  }
  return out;
}

Expr replay(const Derivation& derivation, const Expr& start) {
  Expr cur = start;
  for (std::size_t i = 0; i < derivation.steps.size(); ++i) {
    const Step& s = derivation.steps[i];
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::Divergence,
                   "derivation diverges at step " + std::to_string(i + 1) + " (" + s.rule + "): " + why);
    };
    if (s.before != cur) throw fail("recorded input is " + emit_math(s.before) + ", replay has " + emit_math(cur));
    const RewriteRule* rule = find_rule(s.rule);
    if (!rule) throw fail("unknown rule");
    std::optional<Expr> after;
    try {
      after = apply_rule(*rule, cur, s.path);
    } catch (const std::out_of_range&) {
      throw fail("path does not exist");
    }
    if (!after) throw fail("rule does not match at the recorded path");
    if (*after != s.after) throw fail("rule produces " + emit_math(*after) + ", recorded " + emit_math(s.after));
    cur = std::move(*after);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// beam search

namespace {

struct Node {
  Expr expr;
  Derivation derivation;
  double score = 0.0;
  std::string text;  // emit_math, for deterministic tie-breaks
};

double mean_bits(const Expr& e, const Sample& sample) {
  auto b = ground_truth_bits(e, sample);
  return std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
}

bool better(double sa, const Node& a, double sb, const Node& b) {
  if (sa != sb) return sa < sb;
  if (a.expr.size() != b.expr.size()) return a.expr.size() < b.expr.size();
  return a.text < b.text;
}

}  // namespace

SuggestResult suggest(const Spec& spec, const Sample& sample, const Expr& start,
                      const SuggestOptions& options) {
  (void)spec;
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + options.budget;
  const std::size_t size_cap = std::max<std::size_t>(2 * start.size(), start.size() + 16);

  SuggestResult result;
  std::vector<Node> pool;
  std::unordered_set<std::string> seen;
  pool.push_back(Node{start, {}, mean_bits(start, sample), emit_math(start)});
  seen.insert(emit_fpcore_body(start));

  auto out_of_time = [&] {
    if (options.stop.stop_requested()) {
      result.cancelled = true;
      return true;
    }
    if (clock::now() >= deadline) {
      result.timed_out = true;
      return true;
    }
    return false;
  };

  std::vector<std::size_t> frontier{0};
  bool halted = false;
  for (std::size_t depth = 0; depth < options.depth && !halted && !frontier.empty(); ++depth) {
    std::vector<std::size_t> children;
    for (std::size_t fi : frontier) {
      if (halted) break;
      auto steps = one_step_rewrites(pool[fi].expr, &sample);
      for (auto& step : steps) {
        if (out_of_time()) {
          halted = true;
          break;
        }
        if (step.after.size() > size_cap) continue;
        if (!seen.insert(emit_fpcore_body(step.after)).second) continue;
        Node child;
        child.expr = step.after;
        child.derivation = pool[fi].derivation;
        child.derivation.steps.push_back(std::move(step));
        child.score = mean_bits(child.expr, sample);
        child.text = emit_math(child.expr);
        pool.push_back(std::move(child));
        children.push_back(pool.size() - 1);
      }
    }
    std::sort(children.begin(), children.end(), [&](std::size_t a, std::size_t b) {
      return better(pool[a].score, pool[a], pool[b].score, pool[b]);
    });
    if (children.size() > options.beam) children.resize(options.beam);
    frontier = std::move(children);
  }
  result.explored = pool.size();

  // Full analysis of the most promising expressions.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return better(pool[a].score, pool[a], pool[b].score, pool[b]);
  });
  const std::size_t shortlist = std::max<std::size_t>(4 * options.k, 16);
  if (order.size() > shortlist) order.resize(shortlist);
  if (std::find(order.begin(), order.end(), 0) == order.end()) order.push_back(0);

  std::vector<Suggestion> analyzed;
  double start_average = 0.0;
  for (std::size_t i : order) {
    Suggestion s{pool[i].expr, pool[i].derivation, analyze(pool[i].expr, sample)};
    if (i == 0) start_average = s.report.average;
    analyzed.push_back(std::move(s));
  }
  std::erase_if(analyzed, [&](const Suggestion& s) { return s.report.average > start_average; });
  std::sort(analyzed.begin(), analyzed.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.report.average != b.report.average) return a.report.average < b.report.average;
    if (a.expr.size() != b.expr.size()) return a.expr.size() < b.expr.size();
    return emit_math(a.expr) < emit_math(b.expr);
  });
  if (analyzed.size() > options.k) analyzed.resize(options.k);
  result.candidates = std::move(analyzed);
  return result;
}

}  // namespace fpwb
