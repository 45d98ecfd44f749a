#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fpwb/analysis.hpp"
#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"
#include "fpwb/parse.hpp"
#include "property_suites.hpp"

using namespace fpwb;

namespace {

const char* kNaive = "log(x + sqrt(x * x + 1))";

const LocalErrorNode& node(const LocalErrorTree& t, const Path& path) {
  for (const auto& n : t.nodes) {
    if (n.path == path) return n;
  }
  throw std::runtime_error("no node at path");
}

bool straight_line(const Expr& e) {
  if (e.op() == Op::If) return false;
  for (const auto& c : e.children()) {
    if (!straight_line(c)) return false;
  }
  return true;
}

}  // namespace

TEST(Analyze, ReportShape) {
  Spec spec = make_spec(parse_math("x + 1 - x"), {{"x", 1e10, 1e20}}, 128, 42);
  Sample s = sample(spec);
  ErrorReport r = analyze(spec.expr, s);
  ASSERT_EQ(r.bits.size(), s.size());
  EXPECT_EQ(r.spec_key, s.spec_key);
  double sum = 0;
  for (double b : r.bits) sum += b;
  EXPECT_DOUBLE_EQ(r.average, sum / r.bits.size());
  EXPECT_EQ(r.worst_bits, r.bits[r.worst_index]);
  EXPECT_GT(r.average, 10.0);
  EXPECT_GT(s.points[r.worst_index][0], 1e16);
}

TEST(Analyze, IdentityIsExact) {
  Spec spec = make_spec(parse_math("x"), {{"x", 0, 1}}, 64, 42);
  EXPECT_EQ(analyze(spec.expr, sample(spec)).average, 0.0);
}

TEST(Analyze, IsPure) {
  Spec spec = make_spec(parse_math(kNaive), {{"x", 0, 1e308}}, 64, 42);
  Sample s = sample(spec);
  Expr other = parse_math("log1p(x + x * (x / (hypot(1, x) + 1)))");
  EXPECT_EQ(analyze(other, s).bits, analyze(other, s).bits);
}

TEST(Analyze, CandidatesUseTheirOwnExactValue) {
  // exp(x) - 1 and expm1(x) are the same real function; the naive form
  // loses everything near 0 while expm1 is correctly rounded.
  Spec spec = make_spec(parse_math("exp(x) - 1"), {{"x", -1e-10, 1e-10}}, 64, 42);
  Sample s = sample(spec);
  EXPECT_GT(analyze(spec.expr, s).average, 20.0);
  EXPECT_LT(analyze(parse_math("expm1(x)"), s).average, 1.0);
}

TEST(Analyze, GroundTruthBitsAgreeOnEquivalentForms) {
  Spec spec = make_spec(parse_math(kNaive), {{"x", 0, 1e308}}, 64, 42);
  Sample s = sample(spec);
  EXPECT_EQ(ground_truth_bits(spec.expr, s), analyze(spec.expr, s).bits);
}

TEST(LocalError, CancellationExample) {
  LocalErrorTree t = local_error(parse_math("(x + 1) - x"), {{"x", 1e16}});
  // 1e16 + 1 is a tie that rounds to 1e16, exactly what binary64 + gives.
  EXPECT_EQ(node(t, {0}).local_bits, 0.0);
  EXPECT_NEAR(node(t, {}).local_bits, 62.0, 0.5);
  EXPECT_EQ(node(t, {0, 1}).local_bits, 0.0);
  EXPECT_EQ(t.worst_node(), 0u);
}

TEST(LocalError, NaiveAsinhBlame) {
  Expr e = parse_math(kNaive);
  LocalErrorTree big = local_error(e, {{"x", 1e200}});
  Op worst = big.nodes[big.worst_node()].op;
  EXPECT_TRUE(worst == Op::Sqrt || worst == Op::Mul);
  LocalErrorTree tiny = local_error(e, {{"x", 1e-10}});
  EXPECT_EQ(tiny.nodes[tiny.worst_node()].op, Op::Log);
}

TEST(LocalError, ConstantsAreExact) {
  LocalErrorTree t = local_error(parse_math("x * 1"), {{"x", 0.1}});
  EXPECT_EQ(node(t, {1}).local_bits, 0.0);
}

TEST(LocalError, UntakenBranchesAreMarked) {
  LocalErrorTree t = local_error(parse_math("x < 0 ? log(-x) : x + 1"), {{"x", 2.0}});
  EXPECT_FALSE(node(t, {1}).taken);
  EXPECT_TRUE(node(t, {1}).invalid);
  EXPECT_TRUE(node(t, {2}).taken);
}

TEST(LocalError, InvalidPointOnTakenPath) {
  try {
    local_error(parse_math("sqrt(x)"), {{"x", -1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPoint);
  }
}

TEST(LocalError, SingleOperationMatchesErrorAt) {
  const char* ops[] = {"sqrt(x)", "exp(x)", "log(x)", "sin(x)", "x * x", "1 / x", "atan(x)"};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> e10(-30, 30);
  for (const char* text : ops) {
    Expr e = parse_math(text);
    for (int i = 0; i < 50; ++i) {
      Point p{{"x", std::pow(10.0, e10(rng))}};
      if (!eval_exact(e, p).valid()) continue;
      LocalErrorTree t = local_error(e, p);
      EXPECT_EQ(t.nodes[0].local_bits, error_at(e, p)) << text << " at " << p["x"];
    }
  }
}

TEST(LocalError, ZeroLocalErrorMeansZeroError) {
  std::mt19937_64 rng(10);
  int zero_cases = 0;
  for (int i = 0; i < 3000; ++i) {
    Expr e = props::random_expr(rng, 3, {"x"});
    if (!straight_line(e)) continue;
    Point p{{"x", std::ldexp(std::generate_canonical<double, 53>(rng), i % 20 - 10)}};
    if (!eval_exact(e, p).valid()) continue;
    LocalErrorTree t;
    try {
      t = local_error(e, p);
    } catch (const Error&) {
      continue;
    }
    bool all_zero = true;
    for (const auto& n : t.nodes) all_zero = all_zero && n.local_bits == 0.0;
    if (!all_zero) continue;
    ++zero_cases;
    EXPECT_EQ(error_at(e, p), 0.0) << emit_math(e);
  }
  EXPECT_GT(zero_cases, 50);
}

TEST(LocalError, ExactnessWitness) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    Expr e = props::random_expr(rng, 3, {"x"});
    Point p{{"x", std::ldexp(std::generate_canonical<double, 53>(rng), i % 40 - 20)}};
    ExactValue v = eval_exact(e, p);
    if (!v.valid()) continue;
    if (error_at(e, p) == 0.0) {
      EXPECT_EQ(to_ordinal(eval_float64(e, p)), to_ordinal(v.rounded));
    }
  }
}
