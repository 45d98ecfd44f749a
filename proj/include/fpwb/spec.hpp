#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fpwb/expr.hpp"

namespace fpwb {

inline constexpr double kMaxFinite = 1.7976931348623157e308;
inline constexpr std::size_t kDefaultPoints = 256;
inline constexpr std::uint64_t kDefaultSeedValue = 42;

struct VarRange {
  std::string name;
  double lo = -kMaxFinite;
  double hi = kMaxFinite;

  bool operator==(const VarRange&) const = default;
};

/// Problem statement: the target expression and where it must be accurate.
struct Spec {
  Expr expr;
  std::vector<VarRange> vars;
  std::size_t points = kDefaultPoints;
  std::uint64_t seed = kDefaultSeedValue;

  const VarRange* find(std::string_view name) const;
  std::vector<std::string> var_names() const;
  /// Same spec with the given ranges replacing existing ones by name.
  Spec with_ranges(const std::vector<VarRange>& ranges) const;
  bool operator==(const Spec& other) const;
};

/// Honors FPWB_SEED when set, else kDefaultSeedValue.
std::uint64_t default_seed();

/// Builds a spec whose variable order follows first appearance in `expr`.
/// Variables without an entry in `ranges` get the full binary64 range when
/// `fill_missing` is set; otherwise an InvalidRange error is raised.
Spec make_spec(Expr expr, const std::vector<VarRange>& ranges,
               std::size_t points = kDefaultPoints,
               std::uint64_t seed = kDefaultSeedValue, bool fill_missing = false);

/// Throws InvalidRange / UnboundVariable when the spec is malformed.
void validate_spec(const Spec& spec);

/// 16-hex-digit key identifying (expression, ranges, size, seed).
std::string spec_key(const Spec& spec);

/// Parses a range bound written in decimal or scientific notation.
double parse_bound(std::string_view text);
/// Parses "name=LO:HI".
VarRange parse_range_flag(std::string_view text);

}  // namespace fpwb
