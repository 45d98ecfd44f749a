#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fpwb/expr.hpp"
#include "fpwb/oracle.hpp"
#include "fpwb/sampler.hpp"

namespace fpwb {

struct ErrorReport {
  std::string spec_key;
  std::vector<double> bits;  // aligned with the sample points
  double average = 0.0;
  std::size_t worst_index = 0;
  double worst_bits = 0.0;
};

/// Exact outputs of `e` at every sample point. When `e` is the sample's own
/// expression the cached ground truth is reused without evaluation.
std::vector<ExactValue> exact_outputs(const Expr& e, const Sample& sample);

/// Per-point error of `e` against its own exact value. Points where that
/// value is invalid or unsamplable are scored against the sample's ground
/// truth instead. Throws UnboundVariable when `e` uses a variable the sample
/// does not bind.
ErrorReport analyze(const Expr& e, const Sample& sample);
/// Same, with exact outputs already computed by `exact_outputs`.
ErrorReport analyze(const Expr& e, const Sample& sample, std::span<const ExactValue> exacts);

/// Per-point error of `e` against the sample's ground truth, using only
/// binary64 evaluation. Cheap; used for ranking during search.
std::vector<double> ground_truth_bits(const Expr& e, const Sample& sample);

ErrorReport summarize(std::string spec_key, std::vector<double> bits);

struct LocalErrorNode {
  Path path;
  Op op;
  std::string label;  // operator name, variable name or literal text
  std::vector<std::size_t> children;  // preorder indices
  double exact = 0.0;     // node value, exactly computed then rounded
  double float_op = 0.0;  // the operator applied in binary64 to rounded exact children
  double local_bits = 0.0;
  bool taken = true;     // false inside an untaken if-branch
  bool invalid = false;  // exact value undefined (only possible when !taken)
};

/// Mirror of the expression in preorder; node 0 is the root.
struct LocalErrorTree {
  std::vector<LocalErrorNode> nodes;
  int precision = 0;  // working precision that settled every node
  std::size_t worst_node() const;
};

/// Error introduced by each operation at `point` when its inputs are the
/// correctly rounded exact values of its children. Comparisons score 0 or 64
/// bits depending on whether the binary64 comparison picks the same branch.
/// Throws InvalidPoint when a node on the evaluated path is undefined.
LocalErrorTree local_error(const Expr& e, const Point& point);

}  // namespace fpwb
