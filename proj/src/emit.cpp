#include "fpwb/emit.hpp"

#include <charconv>
#include <cmath>

namespace fpwb {
namespace {

// Binding strength in the math grammar; higher binds tighter.
int math_level(const Expr& e) {
  switch (e.op()) {
    case Op::If: return 0;
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq: return 3;
    case Op::Add:
    case Op::Sub: return 4;
    case Op::Mul:
    case Op::Div: return 5;
    case Op::Neg: return 6;
    case Op::Num: return e.text().starts_with('-') ? 6 : 7;
    default: return 7;
  }
}

std::string math_rec(const Expr& e, bool top);

std::string math_child(const Expr& child, bool parens) {
  std::string s = math_rec(child, false);
  return parens ? "(" + s + ")" : s;
}

std::string math_rec(const Expr& e, bool top) {
  switch (e.op()) {
    case Op::Var: return e.text();
    case Op::Num: return e.text();
    case Op::Pi: return "PI";
    case Op::E: return "E";
    case Op::Infinity: return "INFINITY";
    case Op::Neg: {
      const Expr& c = e.child(0);
      bool parens = math_level(c) < 6 || (c.op() == Op::Num && !c.text().starts_with('-'));
      return "-" + math_child(c, parens);
    }
    case Op::If: {
      std::string s = math_rec(e.child(0), false) + " ? " + math_rec(e.child(1), false) +
                      " : " + math_rec(e.child(2), false);
      return top ? s : "(" + s + ")";
    }
    default: break;
  }
  const OpInfo& info = op_info(e.op());
  int level = math_level(e);
  if (level < 7) {
    // infix binary operator
    const Expr& l = e.child(0);
    const Expr& r = e.child(1);
    std::string op(info.name);
    return math_child(l, math_level(l) < level) + " " + op + " " +
           math_child(r, math_level(r) <= level);
  }
  std::string s(info.name);
  s += "(";
  for (std::size_t i = 0; i < e.arity(); ++i) {
    if (i) s += ", ";
    s += math_rec(e.child(i), true);
  }
  return s + ")";
}

// ---- LaTeX ----

std::string latex_number(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    return "\\frac{" + text.substr(0, slash) + "}{" + text.substr(slash + 1) + "}";
  }
  auto epos = text.find('e');
  if (epos == std::string::npos) return text;
  std::string exp = text.substr(epos + 1);
  if (!exp.empty() && exp[0] == '+') exp.erase(0, 1);
  return text.substr(0, epos) + " \\cdot 10^{" + exp + "}";
}

std::string latex_rec(const Expr& e);

std::string latex_paren(const Expr& c, bool parens) {
  std::string s = latex_rec(c);
  return parens ? "\\left(" + s + "\\right)" : s;
}

std::string latex_call(std::string_view name, const Expr& e, bool standard) {
  std::string s = standard ? "\\" + std::string(name) : "\\mathsf{" + std::string(name) + "}";
  s += " \\left(";
  for (std::size_t i = 0; i < e.arity(); ++i) {
    if (i) s += ", ";
    s += latex_rec(e.child(i));
  }
  return s + "\\right)";
}

std::string latex_rec(const Expr& e) {
  int level = math_level(e);
  auto bin = [&](const char* op) {
    const Expr& l = e.child(0);
    const Expr& r = e.child(1);
    return latex_paren(l, math_level(l) < level) + " " + op + " " +
           latex_paren(r, math_level(r) <= level);
  };
  switch (e.op()) {
    case Op::Var: return e.text().size() == 1 ? e.text() : "\\mathit{" + e.text() + "}";
    case Op::Num: return latex_number(e.text());
    case Op::Pi: return "\\pi";
    case Op::E: return "e";
    case Op::Infinity: return "\\infty";
    case Op::Neg: return "-" + latex_paren(e.child(0), math_level(e.child(0)) < 6);
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Mul: return bin("\\cdot");
    case Op::Div:
      return "\\frac{" + latex_rec(e.child(0)) + "}{" + latex_rec(e.child(1)) + "}";
    case Op::Sqrt: return "\\sqrt{" + latex_rec(e.child(0)) + "}";
    case Op::Cbrt: return "\\sqrt[3]{" + latex_rec(e.child(0)) + "}";
    case Op::Fabs: return "\\left|" + latex_rec(e.child(0)) + "\\right|";
    case Op::Exp: return "e^{" + latex_rec(e.child(0)) + "}";
    case Op::Pow: {
      const Expr& b = e.child(0);
      return "{" + latex_paren(b, !is_leaf(b.op()) || math_level(b) < 7) + "}^{" +
             latex_rec(e.child(1)) + "}";
    }
    case Op::Log: return latex_call("log", e, true);
    case Op::Sin:
    case Op::Cos:
    case Op::Tan:
    case Op::Sinh:
    case Op::Cosh:
    case Op::Tanh: return latex_call(op_info(e.op()).name, e, true);
    case Op::Asin: return latex_call("sin^{-1}", e, true);
    case Op::Acos: return latex_call("cos^{-1}", e, true);
    case Op::Atan: return latex_call("tan^{-1}", e, true);
    case Op::Lt: return bin("<");
    case Op::Le: return bin("\\le");
    case Op::Gt: return bin(">");
    case Op::Ge: return bin("\\ge");
    case Op::Eq: return bin("=");
    case Op::And: return bin("\\land");
    case Op::Or: return bin("\\lor");
    case Op::If:
      return "\\begin{array}{l}\\mathbf{if}\\;" + latex_rec(e.child(0)) + ":\\\\\\quad " +
             latex_rec(e.child(1)) + "\\\\\\mathbf{else}:\\\\\\quad " + latex_rec(e.child(2)) +
             "\\end{array}";
    default: return latex_call(op_info(e.op()).name, e, false);
  }
}

void fpcore_rec(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::Var:
    case Op::Num: out += e.text(); return;
    case Op::Pi:
    case Op::E:
    case Op::Infinity: out += op_info(e.op()).name; return;
    default: break;
  }
  out += "(";
  out += e.op() == Op::Neg ? std::string_view("-") : op_info(e.op()).name;
  for (const auto& c : e.children()) {
    out += " ";
    fpcore_rec(c, out);
  }
  out += ")";
}

}  // namespace

std::string emit_math(const Expr& e) { return math_rec(e, true); }

std::string emit_latex(const Expr& e) { return latex_rec(e); }

std::string emit_fpcore_body(const Expr& e) {
  std::string out;
  fpcore_rec(e, out);
  return out;
}

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string emit_fpcore(const Expr& e, const Spec& spec) {
  std::string out = "(FPCore (";
  for (std::size_t i = 0; i < spec.vars.size(); ++i) {
    if (i) out += " ";
    out += spec.vars[i].name;
  }
  out += ")";
  if (!spec.vars.empty()) {
    out += " :pre ";
    if (spec.vars.size() > 1) out += "(and";
    for (const auto& v : spec.vars) {
      if (spec.vars.size() > 1) out += " ";
      out += "(<= " + format_double(v.lo) + " " + v.name + " " + format_double(v.hi) + ")";
    }
    if (spec.vars.size() > 1) out += ")";
  }
  out += " :fpwb-points " + std::to_string(spec.points);
  out += " :fpwb-seed " + std::to_string(spec.seed);
  out += " " + emit_fpcore_body(e) + ")";
  return out;
}

}  // namespace fpwb
