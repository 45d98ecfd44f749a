#include "fpwb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "exact_eval.hpp"
#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"

namespace fpwb {

// ---------------------------------------------------------------------------
// binary64 evaluation

double apply_float(Op op, std::span<const double> a) {
  switch (op) {
    case Op::Neg: return -a[0];
    case Op::Add: return a[0] + a[1];
    case Op::Sub: return a[0] - a[1];
    case Op::Mul: return a[0] * a[1];
    case Op::Div: return a[0] / a[1];
    case Op::Sqrt: return std::sqrt(a[0]);
    case Op::Cbrt: return std::cbrt(a[0]);
    case Op::Fabs: return std::fabs(a[0]);
    case Op::Exp: return std::exp(a[0]);
    case Op::Expm1: return std::expm1(a[0]);
    case Op::Log: return std::log(a[0]);
    case Op::Log1p: return std::log1p(a[0]);
    case Op::Pow: return std::pow(a[0], a[1]);
    case Op::Hypot: return std::hypot(a[0], a[1]);
    case Op::Fma: return std::fma(a[0], a[1], a[2]);
    case Op::Sin: return std::sin(a[0]);
    case Op::Cos: return std::cos(a[0]);
    case Op::Tan: return std::tan(a[0]);
    case Op::Asin: return std::asin(a[0]);
    case Op::Acos: return std::acos(a[0]);
    case Op::Atan: return std::atan(a[0]);
    case Op::Atan2: return std::atan2(a[0], a[1]);
    case Op::Sinh: return std::sinh(a[0]);
    case Op::Cosh: return std::cosh(a[0]);
    case Op::Tanh: return std::tanh(a[0]);
    case Op::Asinh: return std::asinh(a[0]);
    case Op::Acosh: return std::acosh(a[0]);
    case Op::Atanh: return std::atanh(a[0]);
    // Conditions yield 1.0 / 0.0.
    case Op::Lt: return a[0] < a[1] ? 1.0 : 0.0;
    case Op::Le: return a[0] <= a[1] ? 1.0 : 0.0;
    case Op::Gt: return a[0] > a[1] ? 1.0 : 0.0;
    case Op::Ge: return a[0] >= a[1] ? 1.0 : 0.0;
    case Op::Eq: return a[0] == a[1] ? 1.0 : 0.0;
    case Op::And: return (a[0] != 0.0 && a[1] != 0.0) ? 1.0 : 0.0;
    case Op::Or: return (a[0] != 0.0 || a[1] != 0.0) ? 1.0 : 0.0;
    case Op::If: return a[0] != 0.0 ? a[1] : a[2];
    default:
      throw Error(ErrorCode::Internal, "apply_float on a leaf operator");
  }
}

double literal_value(const Expr& literal) {
  switch (literal.op()) {
    case Op::Pi: return std::numbers::pi;
    case Op::E: return std::numbers::e;
    case Op::Infinity: return INFINITY;
    case Op::Num: break;
    default: throw Error(ErrorCode::Internal, "literal_value on a non-literal");
  }
  if (is_rational_literal(literal.text())) {
    detail::BigFloat v(256);
    detail::set_literal(v, literal);
    return v.to_double();
  }
  return std::strtod(literal.text().c_str(), nullptr);
}

namespace {

double float_rec(const Expr& e, const Point& point) {
  switch (e.op()) {
    case Op::Var: {
      auto it = point.find(e.text());
      if (it == point.end()) {
        throw Error(ErrorCode::UnboundVariable, "variable '" + e.text() + "' is not bound");
      }
      return it->second;
    }
    case Op::Num:
    case Op::Pi:
    case Op::E:
    case Op::Infinity:
      return literal_value(e);
    case Op::If:
      return float_rec(e.child(0), point) != 0.0 ? float_rec(e.child(1), point)
                                                 : float_rec(e.child(2), point);
    default: break;
  }
  double args[3];
  for (std::size_t i = 0; i < e.arity(); ++i) args[i] = float_rec(e.child(i), point);
  return apply_float(e.op(), std::span<const double>(args, e.arity()));
}

}  // namespace

double eval_float64(const Expr& e, const Point& point) { return float_rec(e, point); }

namespace {
void compile_rec(const Expr& e, const std::vector<std::string>& slots, auto& code,
                 std::size_t depth, std::size_t& max_depth) {
  max_depth = std::max(max_depth, depth + 1);
  for (std::size_t i = 0; i < e.arity(); ++i) {
    compile_rec(e.child(i), slots, code, depth + i, max_depth);
  }
  typename std::remove_reference_t<decltype(code)>::value_type ins{e.op()};
  if (e.op() == Op::Var) {
    auto it = std::find(slots.begin(), slots.end(), e.text());
    if (it == slots.end()) {
      throw Error(ErrorCode::UnboundVariable, "variable '" + e.text() + "' is not bound");
    }
    ins.slot = static_cast<std::uint32_t>(it - slots.begin());
  } else if (is_leaf(e.op())) {
    ins.constant = literal_value(e);
  }
  code.push_back(ins);
}
}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& slots) {
  compile_rec(e, slots, code_, 0, max_stack_);
}

double CompiledExpr::eval(std::span<const double> values) const {
  thread_local std::vector<double> stack;
  stack.clear();
  stack.reserve(max_stack_);
  for (const auto& ins : code_) {
    if (ins.op == Op::Var) {
      stack.push_back(values[ins.slot]);
    } else if (is_leaf(ins.op)) {
      stack.push_back(ins.constant);
    } else {
      auto n = static_cast<std::size_t>(op_info(ins.op).arity);
      double r = apply_float(ins.op, std::span<const double>(stack.data() + stack.size() - n, n));
      stack.resize(stack.size() - n);
      stack.push_back(r);
    }
  }
  return stack.back();
}

// ---------------------------------------------------------------------------
// fixed-precision real evaluation

namespace detail {

double ExactEvaluator::lookup(const std::string& name) const {
  for (const auto& [n, v] : vars_) {
    if (n == name) return v;
  }
  throw Error(ErrorCode::UnboundVariable, "variable '" + name + "' is not bound");
}

std::size_t ExactEvaluator::enter() {
  if (!trace_) return 0;
  trace_->push_back({});
  return next_index_++;
}

BigFloat ExactEvaluator::value(const Expr& e) {
  std::size_t idx = enter();
  BigFloat out(prec_);
  switch (e.op()) {
    case Op::Var:
      mpfr_set_d(out.get(), lookup(e.text()), MPFR_RNDN);
      break;
    case Op::Num:
    case Op::Pi:
    case Op::E:
    case Op::Infinity:
      set_literal(out, e);
      break;
    case Op::If: {
      int t = truth(e.child(0));
      if (trace_) {
        BigFloat a = value(e.child(1));
        BigFloat b = value(e.child(2));
        if (t < 0) {
          mpfr_set_nan(out.get());
        } else {
          out = t ? std::move(a) : std::move(b);
        }
      } else if (t < 0) {
        mpfr_set_nan(out.get());
      } else {
        out = value(e.child(t ? 1 : 2));
      }
      break;
    }
    default: {
      std::vector<BigFloat> args;
      args.reserve(e.arity());
      bool invalid = false;
      for (const auto& c : e.children()) {
        args.push_back(value(c));
        invalid = invalid || args.back().is_nan();
      }
      if (invalid) {
        mpfr_set_nan(out.get());
      } else {
        check_singular(e.op(), args);
        int ternary = apply_exact(e.op(), args.data(), args.size(), out);
        if (e.op() == Op::Add || e.op() == Op::Sub) {
          check_sum(args[0], args[1], out, ternary != 0);
        } else if (e.op() == Op::Fma && args[0].is_regular() && args[1].is_regular()) {
          BigFloat product(prec_);
          apply_exact(Op::Mul, args.data(), 2, product);
          check_sum(product, args[2], out, ternary != 0);
        }
      }
    }
  }
  if (trace_) {
    NodeExact& n = (*trace_)[idx];
    n.evaluated = true;
    n.invalid = out.is_nan();
    n.rounded = out.to_double();
  }
  return out;
}

void ExactEvaluator::check_sum(const BigFloat& a, const BigFloat& b, const BigFloat& result,
                               bool rounded) {
  if (!a.is_regular() || !b.is_regular()) return;
  // Gaps this wide cannot be resolved below the precision cap anyway.
  constexpr mpfr_exp_t kUnresolvable = 16384 - 64;
  const mpfr_exp_t margin = prec_ - 8;
  mpfr_exp_t ea = a.exponent();
  mpfr_exp_t eb = b.exponent();
  mpfr_exp_t gap = ea > eb ? ea - eb : eb - ea;
  if (rounded && gap >= margin && gap < kUnresolvable) unreliable_ = true;
  if (a.inexact || b.inexact) {
    mpfr_exp_t top = std::max(ea, eb);
    if (result.is_zero() || top - result.exponent() >= margin) unreliable_ = true;
  }
}

void ExactEvaluator::check_singular(Op op, const std::vector<BigFloat>& args) {
  auto at = [&](std::size_t i, long v) {
    return args[i].inexact && !args[i].is_nan() && mpfr_cmp_si(args[i].get(), v) == 0;
  };
  switch (op) {
    case Op::Log: if (at(0, 0)) unreliable_ = true; break;
    case Op::Log1p: if (at(0, -1)) unreliable_ = true; break;
    case Op::Div: if (at(1, 0)) unreliable_ = true; break;
    case Op::Pow: if (at(0, 0) && mpfr_sgn(args[1].get()) < 0) unreliable_ = true; break;
    case Op::Atanh: if (at(0, 1) || at(0, -1)) unreliable_ = true; break;
    default: break;
  }
}

int ExactEvaluator::truth(const Expr& e) {
  std::size_t idx = enter();
  int result;
  if (e.op() == Op::And || e.op() == Op::Or) {
    int a = truth(e.child(0));
    int b = truth(e.child(1));
    if (a < 0 || b < 0) {
      result = -1;
    } else {
      result = e.op() == Op::And ? (a && b) : (a || b);
    }
  } else {
    BigFloat a = value(e.child(0));
    BigFloat b = value(e.child(1));
    bool invalid = false;
    bool t = compare_exact(e.op(), a, b, invalid);
    result = invalid ? -1 : (t ? 1 : 0);
    if (!invalid && a.is_regular() && b.is_regular()) {
      BigFloat diff(prec_);
      mpfr_sub(diff.get(), a.get(), b.get(), MPFR_RNDN);
      check_sum(a, b, diff, false);
    }
  }
  if (trace_) {
    NodeExact& n = (*trace_)[idx];
    n.evaluated = true;
    n.invalid = result < 0;
    n.truth = result == 1;
    n.rounded = result == 1 ? 1.0 : 0.0;
  }
  return result;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// precision escalation

OracleCounters& oracle_counters() {
  static OracleCounters counters;
  return counters;
}

std::vector<int> precision_ladder(const OracleOptions& options) {
  std::vector<int> out;
  for (int p = options.start_precision; p < options.max_precision; p *= 2) out.push_back(p);
  out.push_back(options.max_precision);
  return out;
}

namespace {

ExactValue classify(const detail::BigFloat& r, int precision) {
  ExactValue v;
  v.precision = precision;
  if (r.is_nan()) {
    v.kind = ExactValue::Kind::Invalid;
    v.rounded = NAN;
  } else if (r.is_inf()) {
    v.kind = mpfr_sgn(r.get()) > 0 ? ExactValue::Kind::PosInf : ExactValue::Kind::NegInf;
    v.rounded = r.to_double();
  } else {
    v.kind = ExactValue::Kind::Finite;
    v.rounded = r.to_double();
  }
  return v;
}

bool same_outcome(const ExactValue& a, const ExactValue& b) {
  bool ia = a.kind == ExactValue::Kind::Invalid;
  bool ib = b.kind == ExactValue::Kind::Invalid;
  if (ia || ib) return ia && ib;
  return a.kind == b.kind && ulps(a.rounded, b.rounded) == 0;
}

ExactValue escalate(const Expr& e, const detail::VarValues& vars, const OracleOptions& options) {
  oracle_counters().exact_evaluations.fetch_add(1, std::memory_order_relaxed);
  detail::widen_exponent_range();
  ExactValue prev;
  bool have_prev = false;
  for (int p : precision_ladder(options)) {
    mpfr_clear_flags();
    detail::ExactEvaluator evaluator(p, vars);
    detail::BigFloat r = evaluator.value(e);
    if (mpfr_overflow_p() || mpfr_underflow_p()) {
      // Beyond even MPFR's exponent range; more precision cannot help.
      ExactValue v = classify(r, p);
      v.kind = ExactValue::Kind::Unsamplable;
      return v;
    }
    ExactValue cur = classify(r, p);
    if (have_prev && evaluator.reliable() && same_outcome(prev, cur)) return cur;
    prev = cur;
    have_prev = true;
  }
  prev.kind = ExactValue::Kind::Unsamplable;
  return prev;
}

detail::VarValues to_vars(const Point& point) {
  detail::VarValues vars;
  for (const auto& [k, v] : point) vars.emplace_back(k, v);
  return vars;
}

}  // namespace

ExactValue eval_exact(const Expr& e, const Point& point, const OracleOptions& options) {
  return escalate(e, to_vars(point), options);
}

ExactValue eval_exact(const Expr& e, const std::vector<std::string>& slots,
                      std::span<const double> values, const OracleOptions& options) {
  detail::VarValues vars;
  for (std::size_t i = 0; i < slots.size(); ++i) vars.emplace_back(slots[i], values[i]);
  return escalate(e, vars, options);
}

ExactValue eval_exact_at(const Expr& e, const Point& point, int precision) {
  detail::widen_exponent_range();
  auto vars = to_vars(point);
  detail::BigFloat r = detail::ExactEvaluator(precision, vars).value(e);
  return classify(r, precision);
}

double error_at(const Expr& e, const Point& point) {
  ExactValue exact = eval_exact(e, point);
  if (!exact.valid()) {
    throw Error(ErrorCode::InvalidPoint,
                exact.kind == ExactValue::Kind::Invalid
                    ? "expression is undefined (domain error) at this point"
                    : "exact value could not be determined within the precision cap");
  }
  return bits(exact.rounded, eval_float64(e, point));
}

}  // namespace fpwb
