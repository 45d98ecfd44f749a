#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fpwb {

/// Position of a binary64 value in the total order of representable doubles.
/// +0 and -0 both map to 0; +inf sits one past the largest finite double.
/// Undefined for NaN.
std::int64_t to_ordinal(double x);
double from_ordinal(std::int64_t ordinal);

/// Number of representable doubles between a and b. Both NaN gives 0,
/// exactly one NaN gives the saturated maximum.
std::uint64_t ulps(double a, double b);
/// log2(1 + ulps(a, b)), in [0, 64].
double bits(double a, double b);
double bits_from_ulps(std::uint64_t distance);

/// "0x3ff0000000000000"
std::string to_hex(double value);
/// Accepts the to_hex spelling. Throws BadRequest on malformed input.
double from_hex(std::string_view text);

/// Unbiased exponent of a finite nonzero double (subnormals report < -1022).
int binade(double x);

}  // namespace fpwb
