#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fpwb/error.hpp"
#include "fpwb/float_bits.hpp"

using namespace fpwb;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinSub = std::numeric_limits<double>::denorm_min();
}  // namespace

TEST(Ordinal, ZerosCoincide) {
  EXPECT_EQ(to_ordinal(0.0), 0);
  EXPECT_EQ(to_ordinal(-0.0), 0);
  EXPECT_EQ(to_ordinal(kMinSub), 1);
  EXPECT_EQ(to_ordinal(-kMinSub), -1);
}

TEST(Ordinal, AdjacentDoublesDifferByOne) {
  for (double x : {1.0, -1.0, 1e-300, 3.5e200, kMinSub}) {
    EXPECT_EQ(to_ordinal(std::nextafter(x, kInf)) - to_ordinal(x), 1) << x;
  }
  EXPECT_EQ(to_ordinal(kInf) - to_ordinal(std::numeric_limits<double>::max()), 1);
}

TEST(Ordinal, RoundTrips) {
  for (double x : {0.0, 1.0, -2.5, 1e308, -kMinSub, kInf, -kInf}) {
    EXPECT_EQ(from_ordinal(to_ordinal(x)), x);
  }
}

TEST(Ulps, Basics) {
  EXPECT_EQ(ulps(1.0, 1.0), 0u);
  EXPECT_EQ(ulps(0.0, -0.0), 0u);
  EXPECT_EQ(ulps(1.0, std::nextafter(1.0, 2.0)), 1u);
  EXPECT_EQ(ulps(-kMinSub, kMinSub), 2u);
  EXPECT_EQ(ulps(kNaN, kNaN), 0u);
  EXPECT_EQ(ulps(kNaN, 1.0), std::numeric_limits<std::uint64_t>::max());
  EXPECT_EQ(ulps(-kInf, kInf), 2 * static_cast<std::uint64_t>(to_ordinal(kInf)));
}

TEST(Bits, Range) {
  EXPECT_EQ(bits(2.0, 2.0), 0.0);
  EXPECT_DOUBLE_EQ(bits(1.0, std::nextafter(1.0, 2.0)), 1.0);
  EXPECT_EQ(bits(kNaN, 0.0), 64.0);
  EXPECT_LE(bits(-kInf, kInf), 64.0);
  EXPECT_GT(bits(0.0, 1.0), 61.0);
}

TEST(Hex, RoundTripAndErrors) {
  EXPECT_EQ(to_hex(1.0), "0x3ff0000000000000");
  EXPECT_EQ(from_hex("0x3ff0000000000000"), 1.0);
  EXPECT_TRUE(std::signbit(from_hex(to_hex(-0.0))));
  EXPECT_THROW(from_hex("0x3ff"), Error);
  EXPECT_THROW(from_hex("3ff0000000000000zz"), Error);
}

TEST(Binade, Exponents) {
  EXPECT_EQ(binade(1.0), 0);
  EXPECT_EQ(binade(3.0), 1);
  EXPECT_EQ(binade(0.5), -1);
  EXPECT_LT(binade(kMinSub), -1022);
}
