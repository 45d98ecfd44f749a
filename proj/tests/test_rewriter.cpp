#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/parse.hpp"
#include "fpwb/rewriter.hpp"

using namespace fpwb;

namespace {

Expr m(const char* text) { return parse_math(text); }

const RewriteRule& rule(std::string_view name) {
  const RewriteRule* r = find_rule(name);
  if (!r) throw std::runtime_error("missing rule " + std::string(name));
  return *r;
}

bool contains_op(const Expr& e, Op op) {
  if (e.op() == op) return true;
  return std::any_of(e.children().begin(), e.children().end(),
                     [&](const Expr& c) { return contains_op(c, op); });
}

}  // namespace

TEST(Pattern, BindsConsistently) {
  auto b = match_pattern(m("a - a"), m("sin(x) - sin(x)"));
  ASSERT_TRUE(b);
  EXPECT_EQ(b->at("a"), m("sin(x)"));
  EXPECT_FALSE(match_pattern(m("a - a"), m("sin(x) - cos(x)")));
  EXPECT_TRUE(match_pattern(m("a + 0"), m("x + 0.0")));
  EXPECT_FALSE(match_pattern(m("a + 0"), m("x + 1")));
  EXPECT_EQ(instantiate(m("hypot(1, a)"), *match_pattern(m("sqrt(a * a + 1)"), m("sqrt(y * y + 1)"))),
            m("hypot(1, y)"));
}

TEST(Rules, CatalogIsWellFormed) {
  const auto& db = rule_db();
  EXPECT_GE(db.size(), 50u);
  for (const auto& r : db) {
    if (r.name == kConstFold) continue;
    auto lhs_vars = free_variables(r.lhs);
    for (const auto& v : free_variables(r.rhs)) {
      EXPECT_NE(std::find(lhs_vars.begin(), lhs_vars.end(), v), lhs_vars.end())
          << r.name << " introduces " << v;
    }
    EXPECT_EQ(r.soundness == Soundness::GuardedApproximation, r.guard.has_value()) << r.name;
    EXPECT_EQ(find_rule(r.name), &r);
  }
}

TEST(Rules, ApplyAtPath) {
  Expr e = m("log(x + sqrt(x * x + 1))");
  auto out = apply_rule(rule("hypot-one"), e, {0, 1});
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, m("log(x + hypot(1, x))"));
  EXPECT_FALSE(apply_rule(rule("hypot-one"), e, {0}));
}

TEST(Rules, ConstantFolding) {
  EXPECT_EQ(*fold_constants(m("0.1 + 0.2"), {}), m("0.3"));
  EXPECT_EQ(*fold_constants(m("-(1)"), {}), m("-1"));
  EXPECT_EQ(*fold_constants(m("1 / 8"), {}), m("0.125"));
  // 1/3 has no finite decimal form.
  EXPECT_FALSE(fold_constants(m("1 / 3"), {}));
  EXPECT_FALSE(fold_constants(m("x + 1"), {}));
  EXPECT_FALSE(fold_constants(m("1 / 0"), {}));
}

TEST(Rules, GuardsUseTheSample) {
  const RewriteRule& taylor = rule("log1p-taylor");
  Spec small = make_spec(m("log(1 + x)"), {{"x", -1e-12, 1e-12}}, 32, 42);
  Spec wide = make_spec(m("log(1 + x)"), {{"x", 0.25, 0.5}}, 32, 42);
  Sample s1 = sample(small), s2 = sample(wide);
  auto b = match_pattern(taylor.lhs, small.expr);
  ASSERT_TRUE(b);
  EXPECT_TRUE(guard_holds(taylor, *b, s1));
  EXPECT_FALSE(guard_holds(taylor, *b, s2));

  auto names = [](const std::vector<Step>& steps) {
    std::vector<std::string> out;
    for (const auto& s : steps) out.push_back(s.rule);
    return out;
  };
  auto with_small = names(one_step_rewrites(small.expr, &s1));
  auto with_wide = names(one_step_rewrites(small.expr, &s2));
  auto unguarded = names(one_step_rewrites(small.expr, nullptr));
  EXPECT_NE(std::find(with_small.begin(), with_small.end(), "log1p-taylor"), with_small.end());
  EXPECT_EQ(std::find(with_wide.begin(), with_wide.end(), "log1p-taylor"), with_wide.end());
  EXPECT_EQ(std::find(unguarded.begin(), unguarded.end(), "log1p-taylor"), unguarded.end());
  EXPECT_NE(std::find(unguarded.begin(), unguarded.end(), "log1p-intro"), unguarded.end());
}

TEST(Replay, ReproducesAndDetectsDivergence) {
  Expr start = m("sqrt(x * x + 1) - 1");
  Derivation d;
  Expr mid = *apply_rule(rule("hypot-one"), start, {0});
  d.steps.push_back({"hypot-one", {0}, start, mid});
  Expr end = *apply_rule(rule("hypot-sub-one"), mid, {});
  d.steps.push_back({"hypot-sub-one", {}, mid, end});
  EXPECT_EQ(replay(d, start), end);

  Derivation bad = d;
  bad.steps[1].after = m("x");
  try {
    replay(bad, start);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergence);
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(replay(d, m("x")), Error);
}

TEST(Suggest, HypotForSquareRoot) {
  Spec spec = make_spec(m("sqrt(x * x + 1)"), {{"x", 0, 1e308}}, 256, 42);
  Sample s = sample(spec);
  SuggestResult r = suggest(spec, s, spec.expr);
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_TRUE(contains_op(r.candidates[0].expr, Op::Hypot));
  EXPECT_LE(r.candidates[0].report.average, 1.0);
  for (const auto& c : r.candidates) EXPECT_EQ(replay(c.derivation, spec.expr), c.expr);
}

TEST(Suggest, ResultsAreSortedAndBounded) {
  Spec spec = make_spec(m("log(x + sqrt(x * x + 1))"), {{"x", 0, 1e308}}, 256, 42);
  Sample s = sample(spec);
  SuggestOptions o;
  o.k = 3;
  SuggestResult r = suggest(spec, s, spec.expr, o);
  ASSERT_EQ(r.candidates.size(), 3u);
  for (std::size_t i = 1; i < r.candidates.size(); ++i) {
    EXPECT_LE(r.candidates[i - 1].report.average, r.candidates[i].report.average);
  }
  EXPECT_LE(r.candidates[0].report.average, 5.0);
  EXPECT_FALSE(r.timed_out);
}

TEST(Suggest, CancellationCollapses) {
  Spec spec = make_spec(m("x + 1 - x"), {{"x", 1e10, 1e20}}, 128, 42);
  SuggestResult r = suggest(spec, sample(spec), spec.expr);
  ASSERT_FALSE(r.candidates.empty());
  EXPECT_EQ(r.candidates[0].expr, m("1"));
}

TEST(Suggest, NothingBeatsTheIdentity) {
  Spec spec = make_spec(m("x"), {{"x", 0, 1}}, 64, 42);
  SuggestOptions o;
  o.k = 1;
  SuggestResult r = suggest(spec, sample(spec), spec.expr, o);
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].expr, m("x"));
}

TEST(Suggest, BudgetAndCancellation) {
  Spec spec = make_spec(m("log(x + sqrt(x * x + 1))"), {{"x", 0, 1e308}}, 256, 42);
  Sample s = sample(spec);
  SuggestOptions o;
  o.budget = std::chrono::milliseconds(1);
  SuggestResult r = suggest(spec, s, spec.expr, o);
  EXPECT_TRUE(r.timed_out);
  EXPECT_FALSE(r.candidates.empty());

  std::stop_source stop;
  stop.request_stop();
  SuggestOptions c;
  c.stop = stop.get_token();
  EXPECT_TRUE(suggest(spec, s, spec.expr, c).cancelled);
}
