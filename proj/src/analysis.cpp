#include "fpwb/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "exact_eval.hpp"
#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"

namespace fpwb {

namespace {

void check_bound(const Expr& e, const Sample& sample) {
  for (const auto& v : free_variables(e)) {
    if (std::find(sample.vars.begin(), sample.vars.end(), v) == sample.vars.end()) {
      throw Error(ErrorCode::UnboundVariable,
                  "variable '" + v + "' has no range in the current specification");
    }
  }
}

ExactValue from_rounded(double r) {
  ExactValue v;
  v.rounded = r;
  if (std::isinf(r)) {
    v.kind = r > 0 ? ExactValue::Kind::PosInf : ExactValue::Kind::NegInf;
  } else {
    v.kind = ExactValue::Kind::Finite;
  }
  return v;
}

}  // namespace

ErrorReport summarize(std::string spec_key, std::vector<double> bits) {
  ErrorReport r;
  r.spec_key = std::move(spec_key);
  double sum = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    sum += bits[i];
    if (bits[i] > r.worst_bits) {
      r.worst_bits = bits[i];
      r.worst_index = i;
    }
  }
  r.average = bits.empty() ? 0.0 : sum / static_cast<double>(bits.size());
  r.bits = std::move(bits);
  return r;
}

std::vector<ExactValue> exact_outputs(const Expr& e, const Sample& sample) {
  check_bound(e, sample);
  std::vector<ExactValue> out;
  out.reserve(sample.size());
  if (e == sample.expr) {
    for (double r : sample.exacts) out.push_back(from_rounded(r));
    return out;
  }
  for (const auto& p : sample.points) out.push_back(eval_exact(e, sample.vars, p));
  return out;
}

ErrorReport analyze(const Expr& e, const Sample& sample) {
  auto exacts = exact_outputs(e, sample);
  return analyze(e, sample, exacts);
}

ErrorReport analyze(const Expr& e, const Sample& sample, std::span<const ExactValue> exacts) {
  check_bound(e, sample);
  if (exacts.size() != sample.size()) {
    throw Error(ErrorCode::Internal, "exact outputs do not match the sample size");
  }
  CompiledExpr compiled(e, sample.vars);
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double reference = exacts[i].valid() ? exacts[i].rounded : sample.exacts[i];
    out[i] = bits(reference, compiled.eval(sample.points[i]));
  }
  return summarize(sample.spec_key, std::move(out));
}

std::vector<double> ground_truth_bits(const Expr& e, const Sample& sample) {
  check_bound(e, sample);
  CompiledExpr compiled(e, sample.vars);
  std::vector<double> out(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out[i] = bits(sample.exacts[i], compiled.eval(sample.points[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// local error

std::size_t LocalErrorTree::worst_node() const {
  std::size_t best = 0;
  double best_bits = -1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].taken && nodes[i].local_bits > best_bits) {
      best_bits = nodes[i].local_bits;
      best = i;
    }
  }
  return best;
}

namespace {

bool same_trace(const std::vector<detail::NodeExact>& a, const std::vector<detail::NodeExact>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].invalid != b[i].invalid) return false;
    if (!a[i].invalid && ulps(a[i].rounded, b[i].rounded) != 0) return false;
  }
  return true;
}

struct TreeBuilder {
  const std::vector<detail::NodeExact>& trace;
  const Point& point;
  LocalErrorTree& tree;

  std::size_t build(const Expr& e, Path& path, bool taken) {
    std::size_t idx = tree.nodes.size();
    tree.nodes.emplace_back();
    {
      LocalErrorNode& n = tree.nodes[idx];
      n.path = path;
      n.op = e.op();
      n.label = e.text().empty() ? std::string(op_info(e.op()).name) : e.text();
      n.taken = taken;
      n.invalid = trace[idx].invalid;
      n.exact = trace[idx].rounded;
    }
    if (taken && trace[idx].invalid) {
      throw Error(ErrorCode::InvalidPoint,
                  "'" + tree.nodes[idx].label + "' is undefined at this point");
    }

    std::vector<std::size_t> kids;
    for (std::size_t i = 0; i < e.arity(); ++i) {
      bool child_taken = taken;
      if (e.op() == Op::If && i > 0) {
        bool cond = trace[kids[0]].truth;
        child_taken = taken && (i == 1 ? cond : !cond);
      }
      path.push_back(static_cast<std::uint32_t>(i));
      kids.push_back(build(e.child(i), path, child_taken));
      path.pop_back();
    }

    LocalErrorNode& n = tree.nodes[idx];
    n.children = kids;
    if (is_leaf(e.op())) {
      n.float_op = e.op() == Op::Var ? point.find(e.text())->second : literal_value(e);
      n.local_bits = n.invalid ? 0.0 : bits(n.exact, n.float_op);
      return idx;
    }
    double args[3];
    for (std::size_t i = 0; i < kids.size(); ++i) args[i] = tree.nodes[kids[i]].exact;
    n.float_op = apply_float(e.op(), std::span<const double>(args, kids.size()));
    if (n.invalid) {
      n.local_bits = 0.0;
    } else if (is_comparison(e.op())) {
      n.local_bits = (n.float_op != 0.0) == trace[idx].truth ? 0.0 : 64.0;
    } else if (e.is_boolean() || e.op() == Op::If) {
      n.local_bits = 0.0;
    } else {
      n.local_bits = bits(n.exact, n.float_op);
    }
    return idx;
  }
};

}  // namespace

LocalErrorTree local_error(const Expr& e, const Point& point) {
  for (const auto& v : free_variables(e)) {
    if (!point.contains(v)) {
      throw Error(ErrorCode::UnboundVariable, "variable '" + v + "' is not bound");
    }
  }
  detail::widen_exponent_range();
  detail::VarValues vars(point.begin(), point.end());
  oracle_counters().exact_evaluations.fetch_add(1, std::memory_order_relaxed);

  std::vector<detail::NodeExact> prev, cur;
  int settled = 0;
  for (int p : precision_ladder()) {
    cur.clear();
    detail::ExactEvaluator evaluator(p, vars, &cur);
    evaluator.value(e);
    settled = p;
    if (!prev.empty() && evaluator.reliable() && same_trace(prev, cur)) break;
    prev = cur;
  }

  LocalErrorTree tree;
  tree.precision = settled;
  tree.nodes.reserve(cur.size());
  Path path;
  TreeBuilder{cur, point, tree}.build(e, path, true);
  return tree;
}

}  // namespace fpwb
