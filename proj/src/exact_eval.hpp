#pragma once

// Internal: fixed-precision real evaluation shared by the oracle and the
// local-error analysis.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bigfloat.hpp"
#include "fpwb/expr.hpp"

namespace fpwb::detail {

using VarValues = std::vector<std::pair<std::string, double>>;

/// Per-node result of one fixed-precision evaluation, in preorder.
struct NodeExact {
  bool evaluated = false;
  bool invalid = false;
  bool truth = false;    // for condition nodes
  double rounded = 0.0;  // binary64 rounding of the node value
};

class ExactEvaluator {
 public:
  /// With a trace, every node is evaluated (both if-branches) and recorded in
  /// preorder; without one, untaken branches are skipped.
  ExactEvaluator(mpfr_prec_t prec, const VarValues& vars, std::vector<NodeExact>* trace = nullptr)
      : prec_(prec), vars_(vars), trace_(trace) {}

  /// Real value; NaN encodes a domain error.
  BigFloat value(const Expr& e);
  /// 1 true, 0 false, -1 invalid.
  int truth(const Expr& e);

  /// False when some addition absorbed an operand entirely, or cancelled
  /// rounded operands down to their last few bits, or compared rounded
  /// operands closer than the working precision can resolve, or a rounded
  /// argument landed on a singularity. Agreement
  /// between two precisions proves nothing in those cases.
  bool reliable() const { return !unreliable_; }

 private:
  double lookup(const std::string& name) const;
  std::size_t enter();
  // A rounded argument sitting exactly on a pole or domain edge says nothing
  // about which side the real argument lies on.
  void check_singular(Op op, const std::vector<BigFloat>& args);
  void check_sum(const BigFloat& a, const BigFloat& b, const BigFloat& result, bool rounded);

  mpfr_prec_t prec_;
  const VarValues& vars_;
  std::vector<NodeExact>* trace_;
  std::size_t next_index_ = 0;
  bool unreliable_ = false;
};

}  // namespace fpwb::detail
