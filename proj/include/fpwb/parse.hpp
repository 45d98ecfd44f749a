#pragma once

#include <string_view>

#include "fpwb/expr.hpp"
#include "fpwb/spec.hpp"

namespace fpwb {

/// Parses infix math syntax such as "log(x + sqrt(x * x + 1))".
///
/// Precedence from loosest to tightest: `c ? a : b`, `or`, `and`,
/// comparisons, `+ -`, `* /`, `^` (right associative), unary minus.
/// A unary minus written directly before a numeric literal produces a
/// negative literal. Errors are thrown as fpwb::Error with a byte span and
/// the set of expected tokens.
Expr parse_math(std::string_view text);

/// Parses a single `(FPCore (vars...) props... body)` form in the supported
/// subset. Ranges come from `:pre`; missing bounds default to the full
/// binary64 range. `:fpwb-points` and `:fpwb-seed` properties, when present,
/// restore the sample size and seed.
Spec parse_fpcore(std::string_view text);

}  // namespace fpwb
