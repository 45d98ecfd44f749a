#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fpwb/error.hpp"
#include "fpwb/oracle.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/rewriter.hpp"

namespace fpwb {

namespace {

struct RuleText {
  const char* name;
  const char* lhs;
  const char* rhs;
  const char* description;
  const char* guard = nullptr;  // guarded approximations only
  double bound = 0.0;
  bool at_least = false;
};

constexpr double kTiny = 0x1p-26;

// clang-format off
const RuleText kExact[] = {
    {"add-commute", "a + b", "b + a", "commutativity of +"},
    {"mul-commute", "a * b", "b * a", "commutativity of *"},
    {"add-assoc-l", "(a + b) + c", "a + (b + c)", "regroup a sum"},
    {"add-assoc-r", "a + (b + c)", "(a + b) + c", "regroup a sum"},
    {"mul-assoc-l", "(a * b) * c", "a * (b * c)", "regroup a product"},
    {"mul-assoc-r", "a * (b * c)", "(a * b) * c", "regroup a product"},
    {"add-sub-cancel", "(a + b) - a", "b", "cancel a term added and subtracted"},
    {"add-sub-cancel-r", "(b + a) - a", "b", "cancel a term added and subtracted"},
    {"sub-add-assoc", "(a + b) - c", "a + (b - c)", "move a subtraction inward"},
    {"sub-sub", "a - (b - c)", "(a - b) + c", "distribute a negation"},
    {"sub-neg", "a - b", "a + -b", "subtraction as addition"},
    {"sub-flip", "a - b", "-(b - a)", "reverse a subtraction"},
    {"neg-neg", "-(-a)", "a", "double negation"},
    {"sub-self", "a - a", "0", "a value minus itself"},
    {"add-zero", "a + 0", "a", "additive identity"},
    {"mul-one", "a * 1", "a", "multiplicative identity"},
    {"div-one", "a / 1", "a", "division by one"},
    {"distribute", "a * (b + c)", "a * b + a * c", "distribute a product over a sum"},
    {"factor", "a * b + a * c", "a * (b + c)", "factor out a common term"},
    {"diff-squares", "a * a - b * b", "(a - b) * (a + b)", "difference of squares"},
    {"diff-squares-expand", "(a - b) * (a + b)", "a * a - b * b", "expand a difference of squares"},
    {"frac-add", "a / c + b / c", "(a + b) / c", "add fractions with a common denominator"},
    {"mul-div-assoc", "(a * b) / c", "a * (b / c)", "divide before multiplying"},
    {"div-renormalize", "a / (a + b)", "1 / (1 + b / a)", "renormalize a ratio by its numerator"},
    {"div-to-mul", "a / b", "a * (1 / b)", "division as multiplication by a reciprocal"},
    {"sqr-pow", "a * a", "pow(a, 2)", "square as a power"},
    {"pow-sqr", "pow(a, 2)", "a * a", "power as a square"},
    {"hypot-intro", "sqrt(a * a + b * b)", "hypot(a, b)", "sum of squares under a root"},
    {"hypot-one", "sqrt(a * a + 1)", "hypot(1, a)", "sum of squares under a root with 1 = 1 * 1"},
    {"hypot-one-l", "sqrt(1 + a * a)", "hypot(1, a)", "sum of squares under a root with 1 = 1 * 1"},
    {"sqrt-sqr", "sqrt(a * a)", "fabs(a)", "root of a square"},
    {"sqrt-rationalize", "sqrt(a) - sqrt(b)", "(a - b) / (sqrt(a) + sqrt(b))", "rationalize a difference of roots"},
    {"sqrt-sub-rationalize", "sqrt(a) - b", "(a - b * b) / (sqrt(a) + b)", "rationalize a root minus a value"},
    {"hypot-sub-one", "hypot(1, a) - 1", "(a * a) / (hypot(1, a) + 1)", "rationalize hypot(1, a) - 1"},
    {"log1p-intro", "log(1 + a)", "log1p(a)", "logarithm of one plus a value"},
    {"log1p-intro-r", "log(a + 1)", "log1p(a)", "logarithm of one plus a value"},
    {"log-to-log1p", "log(a + b)", "log1p(a + (b - 1))", "shift a logarithm's argument by one"},
    {"expm1-intro", "exp(a) - 1", "expm1(a)", "exponential minus one"},
    {"fma-intro", "a * b + c", "fma(a, b, c)", "fused multiply-add"},
    {"fma-intro-r", "c + a * b", "fma(a, b, c)", "fused multiply-add"},
    {"exp-sum", "exp(a + b)", "exp(a) * exp(b)", "exponential of a sum"},
    {"exp-neg", "exp(-a)", "1 / exp(a)", "exponential of a negation"},
    {"log-mul", "log(a * b)", "log(a) + log(b)", "logarithm of a product"},
    {"log-div", "log(a / b)", "log(a) - log(b)", "logarithm of a quotient"},
    {"log-exp", "log(exp(a))", "a", "logarithm of an exponential"},
    {"exp-log", "exp(log(a))", "a", "exponential of a logarithm"},
    {"log1p-expm1", "log1p(expm1(a))", "a", "inverse pair"},
    {"expm1-log1p", "expm1(log1p(a))", "a", "inverse pair"},
    {"sinh-def", "sinh(a)", "(exp(a) - exp(-a)) / 2", "hyperbolic sine from exponentials"},
    {"cosh-def", "cosh(a)", "(exp(a) + exp(-a)) / 2", "hyperbolic cosine from exponentials"},
    {"one-sub-cos", "1 - cos(a)", "2 * pow(sin(a / 2), 2)", "half-angle form of 1 - cos"},
};

const RuleText kApprox[] = {
    {"log1p-taylor", "log(1 + a)", "a - a * a / 2", "second-order series of log(1 + a)", "a", kTiny},
    {"expm1-taylor", "exp(a) - 1", "a + a * a / 2", "second-order series of exp(a) - 1", "a", kTiny},
    {"exp-taylor", "exp(a)", "1 + a", "first-order series of exp(a)", "a", 0x1p-27},
    {"sqrt-one-taylor", "sqrt(1 + a)", "1 + a / 2", "first-order series of sqrt(1 + a)", "a", kTiny},
    {"sin-taylor", "sin(a)", "a", "first-order series of sin(a)", "a", kTiny},
    {"atan-taylor", "atan(a)", "a", "first-order series of atan(a)", "a", kTiny},
    {"one-sub-cos-taylor", "1 - cos(a)", "a * a / 2", "second-order series of 1 - cos(a)", "a", kTiny},
    {"hypot-one-large", "hypot(1, a)", "fabs(a)", "hypot(1, a) for large a", "a", 0x1p27, true},
};
// clang-format on

std::vector<RewriteRule> build_catalog() {
  std::vector<RewriteRule> out;
  auto add = [&](const RuleText& t, Soundness s) {
    RewriteRule r;
    r.name = t.name;
    r.lhs = parse_math(t.lhs);
    r.rhs = parse_math(t.rhs);
    r.soundness = s;
    r.description = t.description;
    if (t.guard) r.guard = Guard{parse_math(t.guard), t.bound, t.at_least};
    out.push_back(std::move(r));
  };
  for (const auto& t : kExact) add(t, Soundness::ExactIdentity);
  for (const auto& t : kApprox) add(t, Soundness::GuardedApproximation);
  RewriteRule fold;
  fold.name = std::string(kConstFold);
  fold.description = "evaluate arithmetic on literals when the result is an exact decimal";
  out.push_back(std::move(fold));
  return out;
}

// ---------------------------------------------------------------------------
// exact decimal arithmetic for constant folding

constexpr long kMaxFoldExponent = 400;

bool decimal_to_mpq(const std::string& text, mpq_t out) {
  std::string c = canonical_number(text);
  bool negative = c.starts_with('-');
  if (negative) c.erase(0, 1);
  long exponent = 0;
  auto epos = c.find('e');
  if (epos != std::string::npos) {
    exponent = std::stol(c.substr(epos + 1));
    c.resize(epos);
  }
  if (exponent > kMaxFoldExponent || exponent < -kMaxFoldExponent) return false;
  mpz_t scale;
  mpz_init(scale);
  mpz_ui_pow_ui(scale, 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  mpq_set_str(out, c.c_str(), 10);
  if (exponent >= 0) {
    mpz_mul(mpq_numref(out), mpq_numref(out), scale);
  } else {
    mpz_mul(mpq_denref(out), mpq_denref(out), scale);
  }
  mpz_clear(scale);
  mpq_canonicalize(out);
  if (negative) mpq_neg(out, out);
  return true;
}

/// Shortest plain decimal for q, or nothing when q has no finite expansion.
std::optional<std::string> mpq_to_decimal(const mpq_t q) {
  mpz_t den, n, factor;
  mpz_init_set(den, mpq_denref(q));
  mpz_init_set_ui(factor, 2);
  unsigned long twos = mpz_remove(den, den, factor);
  mpz_set_ui(factor, 5);
  unsigned long fives = mpz_remove(den, den, factor);
  bool finite = mpz_cmp_ui(den, 1) == 0;
  mpz_clears(den, factor, nullptr);
  if (!finite) return std::nullopt;
  unsigned long k = std::max(twos, fives);
  if (k > static_cast<unsigned long>(kMaxFoldExponent)) return std::nullopt;
  mpz_init(n);
  mpz_ui_pow_ui(n, 10, k);
  mpz_mul(n, n, mpq_numref(q));
  mpz_divexact(n, n, mpq_denref(q));
  bool negative = mpz_sgn(n) < 0;
  mpz_abs(n, n);
  char* raw = mpz_get_str(nullptr, 10, n);
  std::string digits(raw);
  void (*free_fn)(void*, std::size_t);
  mp_get_memory_functions(nullptr, nullptr, &free_fn);
  free_fn(raw, std::strlen(raw) + 1);
  mpz_clear(n);
  if (k > 0) {
    if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
    digits.insert(digits.size() - k, ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
  }
  return (negative ? "-" : "") + digits;
}

}  // namespace

const std::vector<RewriteRule>& rule_db() {
  static const std::vector<RewriteRule> catalog = build_catalog();
  return catalog;
}

const RewriteRule* find_rule(std::string_view name) {
  for (const auto& r : rule_db()) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// matching

namespace {

bool match_rec(const Expr& p, const Expr& e, Bindings& b) {
  if (p.op() == Op::Var) {
    if (e.is_boolean()) return false;
    auto it = b.find(p.text());
    if (it != b.end()) return it->second == e;
    b.emplace(p.text(), e);
    return true;
  }
  if (p.op() != e.op() || p.arity() != e.arity()) return false;
  if (p.op() == Op::Num) return canonical_number(p.text()) == canonical_number(e.text());
  for (std::size_t i = 0; i < p.arity(); ++i) {
    if (!match_rec(p.child(i), e.child(i), b)) return false;
  }
  return true;
}

}  // namespace

std::optional<Bindings> match_pattern(const Expr& pattern, const Expr& e) {
  Bindings b;
  if (!match_rec(pattern, e, b)) return std::nullopt;
  return b;
}

Expr instantiate(const Expr& pattern, const Bindings& bindings) {
  if (pattern.op() == Op::Var) {
    auto it = bindings.find(pattern.text());
    if (it == bindings.end()) {
      throw Error(ErrorCode::Internal, "unbound metavariable '" + pattern.text() + "'");
    }
    return it->second;
  }
  if (pattern.arity() == 0) return pattern;
  std::vector<Expr> kids;
  kids.reserve(pattern.arity());
  for (const auto& c : pattern.children()) kids.push_back(instantiate(c, bindings));
  return Expr::make(pattern.op(), std::move(kids));
}

std::optional<Expr> fold_constants(const Expr& e, const Path& path) {
  const Expr& node = subexpr_at(e, path);
  switch (node.op()) {
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      break;
    default:
      return std::nullopt;
  }
  for (const auto& c : node.children()) {
    if (c.op() != Op::Num || !is_decimal_literal(c.text())) return std::nullopt;
  }
  mpq_t a, b, r;
  mpq_inits(a, b, r, nullptr);
  std::optional<std::string> text;
  bool ok = decimal_to_mpq(node.child(0).text(), a) &&
            (node.arity() < 2 || decimal_to_mpq(node.child(1).text(), b));
  if (ok) {
    switch (node.op()) {
      case Op::Neg: mpq_neg(r, a); break;
      case Op::Add: mpq_add(r, a, b); break;
      case Op::Sub: mpq_sub(r, a, b); break;
      case Op::Mul: mpq_mul(r, a, b); break;
      default:
        if (mpq_sgn(b) == 0) {
          ok = false;
        } else {
          mpq_div(r, a, b);
        }
    }
  }
  if (ok) text = mpq_to_decimal(r);
  mpq_clears(a, b, r, nullptr);
  if (!text) return std::nullopt;
  return replace_at(e, path, Expr::num(*text));
}

std::optional<Expr> apply_rule(const RewriteRule& rule, const Expr& e, const Path& path) {
  if (rule.name == kConstFold) return fold_constants(e, path);
  auto b = match_pattern(rule.lhs, subexpr_at(e, path));
  if (!b) return std::nullopt;
  return replace_at(e, path, instantiate(rule.rhs, *b));
}

bool guard_holds(const RewriteRule& rule, const Bindings& bindings, const Sample& sample) {
  if (!rule.guard) return true;
  Expr term = instantiate(rule.guard->term, bindings);
  CompiledExpr compiled(term, sample.vars);
  for (const auto& p : sample.points) {
    double v = std::fabs(compiled.eval(p));
    bool ok = rule.guard->at_least ? v >= rule.guard->bound : v <= rule.guard->bound;
    if (!ok) return false;  // NaN fails both comparisons
  }
  return true;
}

}  // namespace fpwb
