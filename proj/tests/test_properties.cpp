#include <gtest/gtest.h>

#include "property_suites.hpp"

using namespace fpwb;

namespace {
void expect_ok(const props::Outcome& o) {
  EXPECT_GT(o.checked, 0u);
  EXPECT_EQ(o.failures, 0u) << o.first_failure;
}
}  // namespace

TEST(Property, OrdinalMonotonicity) { expect_ok(props::ordinal_monotonicity(100000, 1)); }

TEST(Property, UlpsLaws) { expect_ok(props::ulps_laws(100000, 2)); }

TEST(Property, ParseEmitRoundTrip) { expect_ok(props::parse_emit_round_trip(5000, 3)); }

TEST(Property, ExactRulesAreSound) {
  auto o = props::rule_soundness(1000, 4);
  EXPECT_EQ(o.checked, 1000u);
  expect_ok(o);
}

TEST(Property, SamplerDeterministicAndContained) {
  expect_ok(props::sampler_determinism_containment(42));
}

TEST(Property, PrecisionEscalationIsStable) {
  auto o = props::precision_stability(1000, 5);
  EXPECT_EQ(o.checked, 1000u);
  expect_ok(o);
}
