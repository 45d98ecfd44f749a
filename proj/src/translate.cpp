#include "fpwb/emit.hpp"
#include "fpwb/error.hpp"
#include "fpwb/parse.hpp"

namespace fpwb {

std::string translate(std::string_view from, std::string_view to, std::string_view text) {
  if (to != "math" && to != "fpcore" && to != "latex") {
    throw Error(ErrorCode::BadRequest, "unknown target format '" + std::string(to) + "'");
  }
  Expr e;
  std::optional<Spec> spec;
  if (from == "math") {
    e = parse_math(text);
    validate(e);
  } else if (from == "fpcore") {
    spec = parse_fpcore(text);
    e = spec->expr;
  } else {
    throw Error(ErrorCode::BadRequest, "unknown source format '" + std::string(from) + "'");
  }
  if (to == "math") return emit_math(e);
  if (to == "latex") return emit_latex(e);
  if (spec) return emit_fpcore(e, *spec);
  std::string out = "(FPCore (";
  auto vars = free_variables(e);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += " ";
    out += vars[i];
  }
  return out + ") " + emit_fpcore_body(e) + ")";
}

}  // namespace fpwb
