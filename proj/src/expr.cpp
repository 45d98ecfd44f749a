#include "fpwb/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "fpwb/error.hpp"

namespace fpwb {
namespace {

constexpr std::array kOps = {
    OpInfo{Op::Var, "var", 0, false},
    OpInfo{Op::Num, "num", 0, false},
    OpInfo{Op::Pi, "PI", 0, false},
    OpInfo{Op::E, "E", 0, false},
    OpInfo{Op::Infinity, "INFINITY", 0, false},
    OpInfo{Op::Neg, "neg", 1, false},
    OpInfo{Op::Add, "+", 2, false},
    OpInfo{Op::Sub, "-", 2, false},
    OpInfo{Op::Mul, "*", 2, false},
    OpInfo{Op::Div, "/", 2, false},
    OpInfo{Op::Sqrt, "sqrt", 1, false},
    OpInfo{Op::Cbrt, "cbrt", 1, false},
    OpInfo{Op::Fabs, "fabs", 1, false},
    OpInfo{Op::Exp, "exp", 1, false},
    OpInfo{Op::Expm1, "expm1", 1, false},
    OpInfo{Op::Log, "log", 1, false},
    OpInfo{Op::Log1p, "log1p", 1, false},
    OpInfo{Op::Pow, "pow", 2, false},
    OpInfo{Op::Hypot, "hypot", 2, false},
    OpInfo{Op::Fma, "fma", 3, false},
    OpInfo{Op::Sin, "sin", 1, false},
    OpInfo{Op::Cos, "cos", 1, false},
    OpInfo{Op::Tan, "tan", 1, false},
    OpInfo{Op::Asin, "asin", 1, false},
    OpInfo{Op::Acos, "acos", 1, false},
    OpInfo{Op::Atan, "atan", 1, false},
    OpInfo{Op::Atan2, "atan2", 2, false},
    OpInfo{Op::Sinh, "sinh", 1, false},
    OpInfo{Op::Cosh, "cosh", 1, false},
    OpInfo{Op::Tanh, "tanh", 1, false},
    OpInfo{Op::Asinh, "asinh", 1, false},
    OpInfo{Op::Acosh, "acosh", 1, false},
    OpInfo{Op::Atanh, "atanh", 1, false},
    OpInfo{Op::Lt, "<", 2, true},
    OpInfo{Op::Le, "<=", 2, true},
    OpInfo{Op::Gt, ">", 2, true},
    OpInfo{Op::Ge, ">=", 2, true},
    OpInfo{Op::Eq, "==", 2, true},
    OpInfo{Op::And, "and", 2, true},
    OpInfo{Op::Or, "or", 2, true},
    OpInfo{Op::If, "if", 3, false},
};

bool is_function_call(Op op) {
  switch (op) {
    case Op::Var:
    case Op::Num:
    case Op::Pi:
    case Op::E:
    case Op::Infinity:
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::And:
    case Op::Or:
    case Op::If:
      return false;
    default:
      return true;
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

std::string strip_leading_zeros(std::string_view digits) {
  auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return "0";
  return std::string(digits.substr(first));
}

}  // namespace

const OpInfo& op_info(Op op) { return kOps[static_cast<std::size_t>(op)]; }

std::span<const OpInfo> all_ops() { return kOps; }

std::optional<Op> function_op(std::string_view name) {
  if (name == "abs") return Op::Fabs;
  for (const auto& info : kOps) {
    if (is_function_call(info.op) && info.name == name) return info.op;
  }
  return std::nullopt;
}

bool is_comparison(Op op) {
  return op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge ||
         op == Op::Eq;
}

bool is_leaf(Op op) { return op_info(op).arity == 0; }

bool is_decimal_literal(std::string_view s) {
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  auto epos = s.find_first_of("eE");
  std::string_view mant = s.substr(0, epos);
  if (epos != std::string_view::npos) {
    std::string_view ex = s.substr(epos + 1);
    if (!ex.empty() && (ex[0] == '-' || ex[0] == '+')) ex.remove_prefix(1);
    if (!all_digits(ex)) return false;
  }
  auto dot = mant.find('.');
  if (dot == std::string_view::npos) return all_digits(mant);
  std::string_view ip = mant.substr(0, dot);
  std::string_view fp = mant.substr(dot + 1);
  if (!all_digits(fp)) return false;
  return ip.empty() || all_digits(ip);
}

bool is_rational_literal(std::string_view s) {
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) s.remove_prefix(1);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return false;
  return all_digits(s.substr(0, slash)) && all_digits(s.substr(slash + 1));
}

std::string canonical_number(std::string_view text) {
  bool negative = false;
  std::string_view s = text;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  if (is_rational_literal(s)) {
    auto slash = s.find('/');
    std::string num = strip_leading_zeros(s.substr(0, slash));
    std::string den = strip_leading_zeros(s.substr(slash + 1));
    if (den == "1") return canonical_number((negative ? "-" : "") + num);
    return (negative && num != "0" ? "-" : "") + num + "/" + den;
  }
  long long exponent = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    exponent = std::stoll(std::string(s.substr(epos + 1)));
    s = s.substr(0, epos);
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot != std::string_view::npos) {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exponent -= static_cast<long long>(s.size() - dot - 1);
  } else {
    digits = std::string(s);
  }
  digits = strip_leading_zeros(digits);
  if (digits == "0") return "0";
  while (digits.size() > 1 && digits.back() == '0') {
    digits.pop_back();
    ++exponent;
  }
  std::string out = negative ? "-" : "";
  out += digits;
  if (exponent != 0) out += "e" + std::to_string(exponent);
  return out;
}

Expr::Expr() {
  static const auto zero = std::make_shared<const Node>(Node{Op::Num, "0", {}, 1, 1});
  node_ = zero;
}

Expr Expr::var(std::string name) {
  return Expr(std::make_shared<const Node>(Node{Op::Var, std::move(name), {}, 1, 1}));
}

Expr Expr::num(std::string text) {
  if (!is_decimal_literal(text) && !is_rational_literal(text)) {
    throw Error(ErrorCode::ParseError, "malformed numeric literal '" + text + "'");
  }
  for (auto& c : text) {
    if (c == 'E') c = 'e';
  }
  if (!text.empty() && text[0] == '+') text.erase(0, 1);
  return Expr(std::make_shared<const Node>(Node{Op::Num, std::move(text), {}, 1, 1}));
}

Expr Expr::constant(Op op) {
  if (op != Op::Pi && op != Op::E && op != Op::Infinity) {
    throw Error(ErrorCode::Internal, "not a named constant");
  }
  return Expr(std::make_shared<const Node>(Node{op, {}, {}, 1, 1}));
}

Expr Expr::make(Op op, std::vector<Expr> children) {
  const OpInfo& info = op_info(op);
  if (is_leaf(op)) {
    throw Error(ErrorCode::Internal, "leaf operators are built with var/num/constant");
  }
  if (static_cast<int>(children.size()) != info.arity) {
    throw Error(ErrorCode::ParseError,
                std::string(info.name) + " expects " + std::to_string(info.arity) +
                    " argument(s), got " + std::to_string(children.size()));
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    bool want_bool = (op == Op::And || op == Op::Or) || (op == Op::If && i == 0);
    if (children[i].is_boolean() != want_bool) {
      throw Error(ErrorCode::ParseError,
                  want_bool ? "condition expected in " + std::string(info.name)
                            : "comparison used in value position of " +
                                  std::string(info.name));
    }
  }
  std::size_t size = 1;
  std::size_t depth = 0;
  for (const auto& c : children) {
    size += c.size();
    depth = std::max(depth, c.depth());
  }
  return Expr(std::make_shared<const Node>(Node{op, {}, std::move(children), size, depth + 1}));
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (op() != other.op() || size() != other.size()) return false;
  if (op() == Op::Var) return text() == other.text();
  if (op() == Op::Num) {
    return text() == other.text() ||
           canonical_number(text()) == canonical_number(other.text());
  }
  for (std::size_t i = 0; i < arity(); ++i) {
    if (child(i) != other.child(i)) return false;
  }
  return true;
}

const Expr& subexpr_at(const Expr& e, const Path& path) {
  const Expr* cur = &e;
  for (auto i : path) cur = &cur->child(i);
  return *cur;
}

namespace {
Expr replace_rec(const Expr& e, const Path& path, std::size_t depth, Expr replacement) {
  if (depth == path.size()) return replacement;
  std::vector<Expr> kids = e.children();
  auto i = path[depth];
  kids.at(i) = replace_rec(kids.at(i), path, depth + 1, std::move(replacement));
  return Expr::make(e.op(), std::move(kids));
}

void collect_paths(const Expr& e, Path& cur, std::vector<Path>& out) {
  out.push_back(cur);
  for (std::uint32_t i = 0; i < e.arity(); ++i) {
    cur.push_back(i);
    collect_paths(e.child(i), cur, out);
    cur.pop_back();
  }
}

void collect_vars(const Expr& e, std::vector<std::string>& out,
                  std::unordered_set<std::string>& seen) {
  if (e.op() == Op::Var) {
    if (seen.insert(e.text()).second) out.push_back(e.text());
    return;
  }
  for (const auto& c : e.children()) collect_vars(c, out, seen);
}
}  // namespace

Expr replace_at(const Expr& e, const Path& path, Expr replacement) {
  return replace_rec(e, path, 0, std::move(replacement));
}

std::vector<Path> all_paths(const Expr& e) {
  std::vector<Path> out;
  Path cur;
  collect_paths(e, cur, out);
  return out;
}

std::vector<std::string> free_variables(const Expr& e) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_vars(e, out, seen);
  return out;
}

void validate(const Expr& e) {
  if (e.is_boolean()) {
    throw Error(ErrorCode::ParseError, "a condition cannot be used as a value");
  }
}

}  // namespace fpwb
