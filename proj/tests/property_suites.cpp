#include "property_suites.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"
#include "fpwb/oracle.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/rewriter.hpp"
#include "fpwb/sampler.hpp"

namespace fpwb::props {

namespace {

std::string random_literal(std::mt19937_64& rng) {
  static const char* kPool[] = {"0",   "1",     "2",      "0.5",   "3.25", "-1",
                                "-2.5e-3", "1e10", "0.1", "-7",   "1e-300", "6.02e23"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kPool) - 1);
  return kPool[pick(rng)];
}

const Op kUnary[] = {Op::Neg, Op::Sqrt, Op::Cbrt, Op::Fabs, Op::Exp,  Op::Expm1, Op::Log,
                     Op::Log1p, Op::Sin, Op::Cos, Op::Tan, Op::Atan, Op::Sinh, Op::Asinh};
const Op kBinary[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow, Op::Hypot, Op::Atan2};
const Op kCompare[] = {Op::Lt, Op::Le, Op::Gt, Op::Ge, Op::Eq};

Expr random_condition(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars) {
  std::uniform_int_distribution<int> kind(0, 5);
  int k = kind(rng);
  if (depth > 1 && k == 0) {
    return Expr::make(Op::And, {random_condition(rng, depth - 1, vars),
                                random_condition(rng, depth - 1, vars)});
  }
  if (depth > 1 && k == 1) {
    return Expr::make(Op::Or, {random_condition(rng, depth - 1, vars),
                               random_condition(rng, depth - 1, vars)});
  }
  std::uniform_int_distribution<std::size_t> cmp(0, std::size(kCompare) - 1);
  return Expr::make(kCompare[cmp(rng)],
                    {random_expr(rng, depth - 1, vars), random_expr(rng, depth - 1, vars)});
}

double log_uniform(std::mt19937_64& rng, double lo_exp, double hi_exp) {
  std::uniform_real_distribution<double> e(lo_exp, hi_exp);
  std::bernoulli_distribution neg(0.5);
  double v = std::pow(10.0, e(rng));
  return neg(rng) ? -v : v;
}

// Real zero carries no sign, so +0 and -0 count as the same value.
bool same_value(const ExactValue& a, const ExactValue& b) {
  return a.kind == b.kind && to_ordinal(a.rounded) == to_ordinal(b.rounded);
}

}  // namespace

Expr random_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& vars) {
  std::uniform_int_distribution<int> kind(0, 9);
  int k = depth <= 1 ? kind(rng) % 2 : kind(rng);
  if (k == 0) {
    std::uniform_int_distribution<std::size_t> v(0, vars.size() - 1);
    return Expr::var(vars[v(rng)]);
  }
  if (k == 1) return Expr::num(random_literal(rng));
  if (k <= 4) {
    std::uniform_int_distribution<std::size_t> op(0, std::size(kUnary) - 1);
    return Expr::make(kUnary[op(rng)], {random_expr(rng, depth - 1, vars)});
  }
  if (k <= 7) {
    std::uniform_int_distribution<std::size_t> op(0, std::size(kBinary) - 1);
    return Expr::make(kBinary[op(rng)],
                      {random_expr(rng, depth - 1, vars), random_expr(rng, depth - 1, vars)});
  }
  if (k == 8) {
    return Expr::make(Op::Fma, {random_expr(rng, depth - 1, vars),
                                random_expr(rng, depth - 1, vars),
                                random_expr(rng, depth - 1, vars)});
  }
  return Expr::make(Op::If, {random_condition(rng, depth - 1, vars),
                             random_expr(rng, depth - 1, vars), random_expr(rng, depth - 1, vars)});
}

double random_double(std::mt19937_64& rng) {
  while (true) {
    double d = std::bit_cast<double>(rng());
    if (!std::isnan(d)) return d;
  }
}

Outcome ordinal_monotonicity(std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t i = 0; i < pairs; ++i) {
    double a = random_double(rng);
    double b = random_double(rng);
    if (i % 4 == 0) b = std::nextafter(a, b);  // exercise adjacent pairs too
    std::int64_t oa = to_ordinal(a), ob = to_ordinal(b);
    ++out.checked;
    bool ok = (a < b) == (oa < ob) && (a == b) == (oa == ob) && (a > b) == (oa > ob);
    if (!ok) out.fail("ordinal order disagrees for " + to_hex(a) + " vs " + to_hex(b));
  }
  return out;
}

Outcome ulps_laws(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t i = 0; i < cases; ++i) {
    double v[3] = {random_double(rng), random_double(rng), random_double(rng)};
    std::sort(std::begin(v), std::end(v));
    auto [a, b, c] = v;
    ++out.checked;
    if (ulps(a, b) != ulps(b, a)) out.fail("ulps not symmetric at " + to_hex(a));
    if (ulps(a, a) != 0) out.fail("ulps(a, a) != 0 at " + to_hex(a));
    if ((ulps(a, b) == 0) != (a == b)) out.fail("ulps zero law fails at " + to_hex(a));
    if (ulps(a, c) != ulps(a, b) + ulps(b, c)) out.fail("ulps not additive at " + to_hex(b));
    if (bits(a, c) < bits(a, b) || bits(a, c) > 64.0) out.fail("bits not monotone at " + to_hex(b));
  }
  return out;
}

Outcome parse_emit_round_trip(std::size_t cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> depth(1, 6);
  const std::vector<std::string> vars = {"x", "y", "z"};
  Outcome out;
  for (std::size_t i = 0; i < cases; ++i) {
    Expr e = random_expr(rng, depth(rng), vars);
    ++out.checked;
    std::string math = emit_math(e);
    try {
      if (parse_math(math) != e) out.fail("math round trip changed " + math);
      std::string body = emit_fpcore_body(e);
      if (parse_fpcore("(FPCore (x y z) " + body + ")").expr != e) {
        out.fail("fpcore round trip changed " + body);
      }
    } catch (const Error& err) {
      out.fail("re-parse of " + math + " failed: " + err.what());
    }
  }
  return out;
}

Outcome rule_soundness(std::size_t instantiations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> vars = {"x", "y"};
  std::vector<const RewriteRule*> rules;
  for (const auto& r : rule_db()) {
    if (r.soundness == Soundness::ExactIdentity) rules.push_back(&r);
  }
  std::uniform_int_distribution<int> depth(1, 2);
  Outcome out;
  std::size_t attempts = 0;
  while (out.checked < instantiations && attempts < 50 * instantiations) {
    ++attempts;
    const RewriteRule& rule = *rules[out.checked % rules.size()];
    Bindings b;
    for (const auto& mv : free_variables(rule.lhs)) b[mv] = random_expr(rng, depth(rng), vars);
    Expr lhs = instantiate(rule.lhs, b);
    Expr rhs = instantiate(rule.rhs, b);
    Point p{{"x", log_uniform(rng, -8, 8)}, {"y", log_uniform(rng, -8, 8)}};
    ExactValue l = eval_exact(lhs, p);
    ExactValue r = eval_exact(rhs, p);
    if (!l.valid() || !r.valid()) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    if (!same_value(l, r)) {
      std::ostringstream why;
      why << rule.name << ": " << emit_math(lhs) << " = " << format_double(l.rounded) << " but "
          << emit_math(rhs) << " = " << format_double(r.rounded) << " at x=" << p["x"]
          << ", y=" << p["y"];
      out.fail(why.str());
    }
  }
  return out;
}

Outcome sampler_determinism_containment(std::uint64_t seed) {
  struct Case {
    const char* expr;
    std::vector<VarRange> ranges;
  };
  const Case cases[] = {
      {"log(x + sqrt(x * x + 1))", {{"x", 0.0, 1e308}}},
      {"x + 1 - x", {{"x", 1e10, 1e20}}},
      {"sqrt(x) / y", {{"x", -1.0, 1.0}, {"y", 1e-5, 1e5}}},
      {"(exp(x) - 2) + exp(-x)", {{"x", -20.0, 20.0}}},
      {"log(x)", {{"x", -1.0, 1.0}}},
  };
  Outcome out;
  for (const auto& c : cases) {
    Spec spec = make_spec(parse_math(c.expr), c.ranges, 128, seed);
    Sample a = sample(spec);
    Sample b = sample(spec);
    ++out.checked;
    if (a.points != b.points || a.spec_key != b.spec_key ||
        std::memcmp(a.exacts.data(), b.exacts.data(), a.exacts.size() * sizeof(double)) != 0) {
      out.fail(std::string("sampling is not deterministic for ") + c.expr);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t s = 0; s < a.vars.size(); ++s) {
        const VarRange* r = spec.find(a.vars[s]);
        double x = a.points[i][s];
        if (!(x >= r->lo && x <= r->hi)) {
          out.fail(std::string("point outside its range for ") + c.expr + ": " + to_hex(x));
        }
      }
      if (!std::isfinite(a.exacts[i]) && !std::isinf(a.exacts[i])) {
        out.fail(std::string("sample kept an invalid point for ") + c.expr);
      }
    }
    Spec other = spec;
    other.seed = seed + 1;
    if (sample(other).points == a.points) {
      out.fail(std::string("different seeds gave the same sample for ") + c.expr);
    }
  }
  return out;
}

Outcome precision_stability(std::size_t points, std::uint64_t seed) {
  const char* exprs[] = {"log(x + sqrt(x * x + 1))", "x + 1 - x", "(exp(x) - 2) + exp(-x)",
                         "sin(x) / x", "expm1(x) - x", "sqrt(x + 1) - sqrt(x)",
                         "pow(x, 3) - x * x * x", "atan(x) - x"};
  std::mt19937_64 rng(seed);
  Outcome out;
  for (std::size_t i = 0; out.checked < points && i < 10 * points; ++i) {
    const char* text = exprs[i % std::size(exprs)];
    Expr e = parse_math(text);
    Point p{{"x", log_uniform(rng, -300, 300)}};
    ExactValue v = eval_exact(e, p);
    if (!v.valid()) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    ExactValue twice = eval_exact_at(e, p, 2 * v.precision);
    if (!same_value(v, twice)) {
      std::ostringstream why;
      why << text << " at x=" << format_double(p["x"]) << " gives " << format_double(v.rounded)
          << " at " << v.precision << " bits but " << format_double(twice.rounded) << " at "
          << 2 * v.precision;
      out.fail(why.str());
    }
  }
  return out;
}

}  // namespace fpwb::props
