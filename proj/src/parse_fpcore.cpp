#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fpwb/error.hpp"
#include "fpwb/parse.hpp"

namespace fpwb {
namespace {

struct SExpr {
  bool is_list = false;
  bool is_string = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t offset = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_single() {
    skip();
    SExpr form = read();
    skip();
    if (pos_ != text_.size()) {
      throw Error(ErrorCode::ParseError, "trailing input after FPCore form",
                  SourceSpan{pos_, text_.size() - pos_}, {"end of input"});
    }
    return form;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) {
      throw Error(ErrorCode::ParseError, "unexpected end of input", SourceSpan{pos_, 0},
                  {"'('", "atom"});
    }
    SExpr out;
    out.offset = pos_;
    char c = text_[pos_];
    if (c == '(' || c == '[') {
      char close = c == '(' ? ')' : ']';
      ++pos_;
      out.is_list = true;
      while (true) {
        skip();
        if (pos_ >= text_.size()) {
          throw Error(ErrorCode::ParseError, "unbalanced parenthesis", SourceSpan{out.offset, 1},
                      {std::string("'") + close + "'"});
        }
        if (text_[pos_] == close) {
          ++pos_;
          return out;
        }
        out.items.push_back(read());
      }
    }
    if (c == ')' || c == ']') {
      throw Error(ErrorCode::ParseError, "unexpected ')'", SourceSpan{pos_, 1}, {"'('", "atom"});
    }
    if (c == '"') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\') ++pos_;
        ++pos_;
      }
      if (pos_ >= text_.size()) {
        throw Error(ErrorCode::ParseError, "unterminated string", SourceSpan{out.offset, 1},
                    {"'\"'"});
      }
      out.is_string = true;
      out.atom = std::string(text_.substr(start, pos_ - start));
      ++pos_;
      return out;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '[' ||
          d == ']' || d == '"' || d == ';') {
        break;
      }
      ++pos_;
    }
    out.atom = std::string(text_.substr(start, pos_ - start));
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void unsupported(const SExpr& at, const std::string& what) {
  throw Error(ErrorCode::UnsupportedConstruct,
              "'" + what + "' is outside the supported FPCore subset",
              SourceSpan{at.offset, what.size()});
}

[[noreturn]] void malformed(const SExpr& at, const std::string& what) {
  throw Error(ErrorCode::ParseError, what, SourceSpan{at.offset, 1});
}

bool is_symbol(const SExpr& s) { return !s.is_list && !s.is_string; }

bool is_number_atom(const std::string& a) {
  return is_decimal_literal(a) || is_rational_literal(a);
}

Op comparison_op(const std::string& name, bool& found) {
  found = true;
  if (name == "<") return Op::Lt;
  if (name == "<=") return Op::Le;
  if (name == ">") return Op::Gt;
  if (name == ">=") return Op::Ge;
  if (name == "==") return Op::Eq;
  found = false;
  return Op::Lt;
}

class Converter {
 public:
  explicit Converter(const std::vector<std::string>& args) : args_(args) {}

  Expr convert(const SExpr& s) {
    if (s.is_string) malformed(s, "string literal in expression position");
    if (!s.is_list) return atom(s);
    if (s.items.empty()) malformed(s, "empty form");
    const SExpr& head = s.items[0];
    if (!is_symbol(head)) unsupported(head, "computed operator");
    const std::string& name = head.atom;
    std::vector<SExpr> rest(s.items.begin() + 1, s.items.end());

    static const char* kExcluded[] = {"while", "while*", "for", "for*", "tensor", "tensor*",
                                      "cast", "!", "let", "let*", "digits", "array", "dim",
                                      "size", "ref", "not", "isnan", "isinf", "isfinite",
                                      "isnormal", "signbit", "!="};
    for (const char* ex : kExcluded) {
      if (name == ex) unsupported(head, name);
    }

    if (name == "if") {
      if (rest.size() != 3) malformed(s, "if expects condition, then, else");
      return make(s, Op::If, {convert(rest[0]), convert(rest[1]), convert(rest[2])});
    }
    if (name == "-" && rest.size() == 1) return make(s, Op::Neg, {convert(rest[0])});
    if (name == "+" || name == "-" || name == "*" || name == "/") {
      Op op = name == "+" ? Op::Add : name == "-" ? Op::Sub : name == "*" ? Op::Mul : Op::Div;
      if (rest.size() != 2) malformed(s, name + " expects 2 arguments");
      return make(s, op, {convert(rest[0]), convert(rest[1])});
    }
    bool is_cmp = false;
    Op cmp = comparison_op(name, is_cmp);
    if (is_cmp) {
      if (rest.size() < 2) malformed(s, name + " expects at least 2 arguments");
      std::vector<Expr> operands;
      for (const auto& r : rest) operands.push_back(convert(r));
      Expr acc = make(s, cmp, {operands[0], operands[1]});
      for (std::size_t i = 2; i < operands.size(); ++i) {
        acc = make(s, Op::And, {acc, make(s, cmp, {operands[i - 1], operands[i]})});
      }
      return acc;
    }
    if (name == "and" || name == "or") {
      if (rest.size() < 2) malformed(s, name + " expects at least 2 arguments");
      Op op = name == "and" ? Op::And : Op::Or;
      Expr acc = convert(rest[0]);
      for (std::size_t i = 1; i < rest.size(); ++i) acc = make(s, op, {acc, convert(rest[i])});
      return acc;
    }
    auto op = function_op(name);
    if (!op || name == "abs") unsupported(head, name);
    std::vector<Expr> kids;
    for (const auto& r : rest) kids.push_back(convert(r));
    return make(s, *op, std::move(kids));
  }

 private:
  Expr make(const SExpr& at, Op op, std::vector<Expr> kids) {
    try {
      return Expr::make(op, std::move(kids));
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, err.what(), SourceSpan{at.offset, 1});
    }
  }

  Expr atom(const SExpr& s) {
    const std::string& a = s.atom;
    if (is_number_atom(a)) return Expr::num(a);
    if (a == "PI") return Expr::constant(Op::Pi);
    if (a == "E") return Expr::constant(Op::E);
    if (a == "INFINITY") return Expr::constant(Op::Infinity);
    if (a.size() > 1 && a[0] == '#') unsupported(s, a);
    if (std::find(args_.begin(), args_.end(), a) != args_.end()) return Expr::var(a);
    bool upper = std::all_of(a.begin(), a.end(), [](unsigned char c) {
      return std::isupper(c) || std::isdigit(c) || c == '_';
    });
    if (upper) unsupported(s, a);  // other named constants (LN2, NAN, ...)
    throw Error(ErrorCode::UnboundVariable, "variable '" + a + "' is not an FPCore argument",
                SourceSpan{s.offset, a.size()});
  }

  const std::vector<std::string>& args_;
};

double bound_value(const SExpr& s) {
  if (!s.is_list && is_number_atom(s.atom)) {
    if (is_rational_literal(s.atom)) {
      auto slash = s.atom.find('/');
      return std::stod(s.atom.substr(0, slash)) / std::stod(s.atom.substr(slash + 1));
    }
    return parse_bound(s.atom);
  }
  if (s.is_list && s.items.size() == 2 && is_symbol(s.items[0]) && s.items[0].atom == "-") {
    return -bound_value(s.items[1]);
  }
  if (!s.is_list && s.atom == "INFINITY") return kMaxFinite;
  unsupported(s, "non-constant range bound");
}

struct Bounds {
  double lo = -kMaxFinite;
  double hi = kMaxFinite;
};

class PreExtractor {
 public:
  PreExtractor(const std::vector<std::string>& args, std::map<std::string, Bounds>& out)
      : args_(args), out_(out) {}

  void extract(const SExpr& pre) {
    if (!pre.is_list || pre.items.empty() || !is_symbol(pre.items[0])) {
      if (!pre.is_list && pre.atom == "TRUE") return;
      unsupported(pre, "precondition");
    }
    const std::string& head = pre.items[0].atom;
    if (head == "and") {
      for (std::size_t i = 1; i < pre.items.size(); ++i) extract(pre.items[i]);
      return;
    }
    bool is_cmp = false;
    Op op = comparison_op(head, is_cmp);
    if (!is_cmp || op == Op::Eq || pre.items.size() < 3) unsupported(pre, "precondition " + head);
    // Normalize (>= a b c) to ascending order.
    std::vector<const SExpr*> chain;
    for (std::size_t i = 1; i < pre.items.size(); ++i) chain.push_back(&pre.items[i]);
    if (op == Op::Gt || op == Op::Ge) std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const SExpr& term = *chain[i];
      std::string var;
      bool abs = false;
      if (!term.is_list && is_arg(term.atom)) {
        var = term.atom;
      } else if (term.is_list && term.items.size() == 2 && is_symbol(term.items[0]) &&
                 term.items[0].atom == "fabs" && !term.items[1].is_list &&
                 is_arg(term.items[1].atom)) {
        var = term.items[1].atom;
        abs = true;
      } else {
        continue;  // a bound; consumed by its neighbours
      }
      Bounds& b = out_[var];
      if (i > 0) {
        if (abs) unsupported(term, "lower bound on fabs");
        b.lo = std::max(b.lo, bound_value(*chain[i - 1]));
      }
      if (i + 1 < chain.size()) {
        double hi = bound_value(*chain[i + 1]);
        b.hi = std::min(b.hi, hi);
        if (abs) b.lo = std::max(b.lo, -hi);
      }
    }
  }

 private:
  bool is_arg(const std::string& a) const {
    return std::find(args_.begin(), args_.end(), a) != args_.end();
  }
  const std::vector<std::string>& args_;
  std::map<std::string, Bounds>& out_;
};

}  // namespace

Spec parse_fpcore(std::string_view text) {
  SExpr form = Reader(text).read_single();
  if (!form.is_list || form.items.empty() || !is_symbol(form.items[0]) ||
      form.items[0].atom != "FPCore") {
    malformed(form, "expected (FPCore ...)");
  }
  std::size_t i = 1;
  if (i < form.items.size() && is_symbol(form.items[i])) ++i;  // optional name
  if (i >= form.items.size() || !form.items[i].is_list) malformed(form, "expected argument list");
  std::vector<std::string> args;
  for (const auto& a : form.items[i].items) {
    if (!is_symbol(a)) unsupported(a, "annotated or dimensioned argument");
    if (std::find(args.begin(), args.end(), a.atom) != args.end()) {
      malformed(a, "duplicate argument '" + a.atom + "'");
    }
    args.push_back(a.atom);
  }
  ++i;
  const SExpr* pre = nullptr;
  Spec spec;
  spec.seed = default_seed();
  while (i + 1 < form.items.size() && is_symbol(form.items[i]) && !form.items[i].atom.empty() &&
         form.items[i].atom[0] == ':') {
    const std::string& key = form.items[i].atom;
    const SExpr& value = form.items[i + 1];
    if (key == ":pre") {
      pre = &value;
    } else if (key == ":precision") {
      if (value.is_list || value.atom != "binary64") unsupported(value, "precision " + value.atom);
    } else if (key == ":fpwb-points") {
      spec.points = static_cast<std::size_t>(std::stoull(value.atom));
    } else if (key == ":fpwb-seed") {
      spec.seed = std::stoull(value.atom);
    }
    i += 2;
  }
  if (i + 1 != form.items.size()) malformed(form, "expected exactly one body expression");

  Converter conv(args);
  spec.expr = conv.convert(form.items[i]);
  if (spec.expr.is_boolean()) malformed(form.items[i], "body must be a real-valued expression");

  std::map<std::string, Bounds> bounds;
  if (pre) PreExtractor(args, bounds).extract(*pre);
  for (const auto& a : args) {
    Bounds b = bounds.count(a) ? bounds[a] : Bounds{};
    spec.vars.push_back({a, b.lo == 0.0 ? 0.0 : b.lo, b.hi == 0.0 ? 0.0 : b.hi});
  }
  validate_spec(spec);
  return spec;
}

}  // namespace fpwb
