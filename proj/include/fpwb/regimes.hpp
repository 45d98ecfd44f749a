#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fpwb/expr.hpp"
#include "fpwb/sampler.hpp"

namespace fpwb {

struct RegimeOptions {
  std::string var;
  std::size_t max_branches = 3;
  /// Cost of each split, in bits summed over points.
  double split_penalty = 1.0;
};

struct RegimeSegment {
  std::size_t candidate = 0;  // index into the input list
  std::size_t first = 0;      // range of positions in the sorted point order
  std::size_t last = 0;       // inclusive
};

struct RegimeResult {
  Expr expr;
  std::vector<RegimeSegment> segments;
  /// thresholds[i] separates segment i (var <= t) from segment i + 1.
  std::vector<double> thresholds;
  /// Sample indices sorted by the split variable.
  std::vector<std::size_t> order;
  double cost = 0.0;  // summed bits plus split penalties
};

/// Picks, for at most `max_branches` contiguous ranges of the split
/// variable, the candidate with the least summed error, charging
/// `split_penalty` per split. `bits[c][i]` is candidate c's error at sample
/// point i. Thresholds sit at the ordinal midpoint between the neighbouring
/// sample points. Throws Degenerate when all candidates are identical.
RegimeResult infer_regimes(const std::vector<Expr>& candidates,
                           const std::vector<std::vector<double>>& bits, const Sample& sample,
                           const RegimeOptions& options);

/// Same, analyzing each candidate on the sample first.
RegimeResult infer_regimes(const std::vector<Expr>& candidates, const Sample& sample,
                           const RegimeOptions& options);

/// Decimal literal whose exact value t' satisfies t <= t' < next(t) and
/// which reads back as t, so `x <= literal` agrees in binary64 and exactly.
std::string threshold_literal(double t);

/// Floor of the ordinal midpoint of a < b.
double ordinal_midpoint(double a, double b);

}  // namespace fpwb
