#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpwb {

enum class Op : std::uint8_t {
  // leaves
  Var,
  Num,
  Pi,
  E,
  Infinity,
  // arithmetic
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Sqrt,
  Cbrt,
  Fabs,
  Exp,
  Expm1,
  Log,
  Log1p,
  Pow,
  Hypot,
  Fma,
  Sin,
  Cos,
  Tan,
  Asin,
  Acos,
  Atan,
  Atan2,
  Sinh,
  Cosh,
  Tanh,
  Asinh,
  Acosh,
  Atanh,
  // conditions
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  And,
  Or,
  // control
  If,
};

struct OpInfo {
  Op op;
  std::string_view name;  // FPCore / function-call spelling
  int arity;
  bool boolean;  // produces a truth value rather than a real
};

const OpInfo& op_info(Op op);
std::span<const OpInfo> all_ops();
/// Looks up a function-call operator by its spelled name (e.g. "hypot").
std::optional<Op> function_op(std::string_view name);
bool is_comparison(Op op);
bool is_leaf(Op op);

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  /// The literal 0.
  Expr();
  static Expr var(std::string name);
  /// Decimal literal ("0.1", "-2.5e-3") or rational literal ("1/3"), kept
  /// exactly as written. Throws ParseError for anything else.
  static Expr num(std::string text);
  static Expr constant(Op op);  // Pi | E | Infinity
  static Expr make(Op op, std::vector<Expr> children);

  Op op() const { return node_->op; }
  /// Variable name or literal text; empty for operators.
  const std::string& text() const { return node_->text; }
  const std::vector<Expr>& children() const { return node_->children; }
  const Expr& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }
  std::size_t size() const { return node_->size; }
  std::size_t depth() const { return node_->depth; }
  bool is_boolean() const { return op_info(op()).boolean; }

  bool operator==(const Expr& other) const;
  bool operator!=(const Expr& other) const { return !(*this == other); }

 private:
  struct Node {
    Op op;
    std::string text;
    std::vector<Expr> children;
    std::size_t size;
    std::size_t depth;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

using Path = std::vector<std::uint32_t>;

const Expr& subexpr_at(const Expr& e, const Path& path);
Expr replace_at(const Expr& e, const Path& path, Expr replacement);
/// Preorder list of every node path.
std::vector<Path> all_paths(const Expr& e);

/// Free variables in order of first appearance.
std::vector<std::string> free_variables(const Expr& e);

/// Canonical spelling used for literal equality: "1.50" == "1.5" == "15e-1".
std::string canonical_number(std::string_view text);
bool is_decimal_literal(std::string_view text);
bool is_rational_literal(std::string_view text);

/// Checks the arity and value/condition typing rules; throws ParseError.
void validate(const Expr& e);

}  // namespace fpwb
