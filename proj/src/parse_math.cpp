#include <cctype>
#include <string>
#include <vector>

#include "fpwb/error.hpp"
#include "fpwb/parse.hpp"

namespace fpwb {
namespace {

enum class Tok {
  Number,
  Ident,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  Comma,
  Question,
  Colon,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::string supported_functions() {
  std::string out;
  for (const auto& info : all_ops()) {
    if (function_op(info.name) == info.op) {
      if (!out.empty()) out += ", ";
      out += info.name;
    }
  }
  return out;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Token number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t int_digits = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      if (digits() == 0) {
        throw Error(ErrorCode::ParseError, "expected digits after '.'", SourceSpan{pos_, 1},
                    {"digit"});
      }
    } else if (int_digits == 0) {
      throw Error(ErrorCode::ParseError, "malformed number", SourceSpan{start, 1}, {"digit"});
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
    }
    return {Tok::Number, std::string(text_.substr(start, pos_ - start)), start};
  }

  Token next() {
    std::size_t start = pos_;
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::Ident, std::string(text_.substr(start, pos_ - start)), start};
    }
    auto two = text_.substr(pos_, 2);
    if (two == "<=") return advance(Tok::Le, 2);
    if (two == ">=") return advance(Tok::Ge, 2);
    if (two == "==") return advance(Tok::EqEq, 2);
    switch (c) {
      case '+': return advance(Tok::Plus, 1);
      case '-': return advance(Tok::Minus, 1);
      case '*': return advance(Tok::Star, 1);
      case '/': return advance(Tok::Slash, 1);
      case '^': return advance(Tok::Caret, 1);
      case '(': return advance(Tok::LParen, 1);
      case ')': return advance(Tok::RParen, 1);
      case ',': return advance(Tok::Comma, 1);
      case '?': return advance(Tok::Question, 1);
      case ':': return advance(Tok::Colon, 1);
      case '<': return advance(Tok::Lt, 1);
      case '>': return advance(Tok::Gt, 1);
      default: break;
    }
    throw Error(ErrorCode::ParseError, std::string("unexpected character '") + c + "'",
                SourceSpan{start, 1}, {"number", "identifier", "operator"});
  }

  Token advance(Tok kind, std::size_t n) {
    Token t{kind, std::string(text_.substr(pos_, n)), pos_};
    pos_ += n;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expr parse_top() {
    std::size_t start = peek().offset;
    Expr e = ternary();
    if (peek().kind != Tok::End) fail({"operator", "end of input"});
    if (e.is_boolean()) {
      throw Error(ErrorCode::ParseError, "a condition cannot be used as a value",
                  SourceSpan{start, peek().offset - start});
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    std::string msg = "unexpected " + got + " at offset " + std::to_string(t.offset) +
                      "; expected one of:";
    for (const auto& e : expected) msg += " " + e;
    throw Error(ErrorCode::ParseError, msg, SourceSpan{t.offset, t.text.size()},
                std::move(expected));
  }

  void expect(Tok kind, const char* spelling) {
    if (!accept(kind)) fail({spelling});
  }

  Expr build(Op op, std::vector<Expr> kids, std::size_t offset, std::size_t len) {
    try {
      return Expr::make(op, std::move(kids));
    } catch (const Error& err) {
      throw Error(ErrorCode::ParseError, err.what(), SourceSpan{offset, len});
    }
  }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  Expr ternary() {
    Expr cond = or_expr();
    if (peek().kind != Tok::Question) return cond;
    std::size_t at = take().offset;
    Expr then_e = ternary();
    expect(Tok::Colon, "':'");
    Expr else_e = ternary();
    return build(Op::If, {cond, then_e, else_e}, at, 1);
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (at_keyword("or")) {
      std::size_t at = take().offset;
      lhs = build(Op::Or, {lhs, and_expr()}, at, 2);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = comparison();
    while (at_keyword("and")) {
      std::size_t at = take().offset;
      lhs = build(Op::And, {lhs, comparison()}, at, 3);
    }
    return lhs;
  }

  Expr comparison() {
    Expr lhs = sum();
    Op op;
    switch (peek().kind) {
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      case Tok::EqEq: op = Op::Eq; break;
      default: return lhs;
    }
    Token t = take();
    return build(op, {lhs, sum()}, t.offset, t.text.size());
  }

  Expr sum() {
    Expr lhs = product();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      Token t = take();
      lhs = build(t.kind == Tok::Plus ? Op::Add : Op::Sub, {lhs, product()}, t.offset, 1);
    }
    return lhs;
  }

  Expr product() {
    Expr lhs = power();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      Token t = take();
      lhs = build(t.kind == Tok::Star ? Op::Mul : Op::Div, {lhs, power()}, t.offset, 1);
    }
    return lhs;
  }

  Expr power() {
    Expr base = unary();
    if (peek().kind != Tok::Caret) return base;
    Token t = take();
    return build(Op::Pow, {base, power()}, t.offset, 1);
  }

  Expr unary() {
    if (peek().kind == Tok::Minus) {
      Token t = take();
      if (peek().kind == Tok::Number) return Expr::num("-" + take().text);
      return build(Op::Neg, {unary()}, t.offset, 1);
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        return Expr::num(take().text);
      case Tok::LParen: {
        take();
        Expr inner = ternary();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail({"number", "identifier", "'('", "'-'"});
    }
  }

  Expr identifier() {
    Token name = take();
    if (name.text == "and" || name.text == "or") {
      --pos_;
      fail({"number", "identifier", "'('"});
    }
    if (peek().kind != Tok::LParen) {
      if (name.text == "PI" || name.text == "pi") return Expr::constant(Op::Pi);
      if (name.text == "E") return Expr::constant(Op::E);
      if (name.text == "INFINITY") return Expr::constant(Op::Infinity);
      return Expr::var(name.text);
    }
    auto op = function_op(name.text);
    if (!op) {
      throw Error(ErrorCode::ParseError,
                  "unknown function '" + name.text + "'; supported: " + supported_functions(),
                  SourceSpan{name.offset, name.text.size()});
    }
    take();  // (
    std::vector<Expr> args;
    if (peek().kind != Tok::RParen) {
      args.push_back(ternary());
      while (accept(Tok::Comma)) args.push_back(ternary());
    }
    expect(Tok::RParen, "')'");
    return build(*op, std::move(args), name.offset, name.text.size());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_math(std::string_view text) {
  Parser parser(Lexer(text).run());
  return parser.parse_top();
}

}  // namespace fpwb
