#pragma once

#include <string>
#include <string_view>

#include "fpwb/expr.hpp"
#include "fpwb/spec.hpp"

namespace fpwb {

std::string emit_math(const Expr& e);
std::string emit_latex(const Expr& e);
/// Body only, e.g. "(log (+ x 1))".
std::string emit_fpcore_body(const Expr& e);
std::string emit_fpcore(const Expr& e, const Spec& spec);
/// Shortest decimal that reads back as exactly `value`.
std::string format_double(double value);

/// Converts expression text between "math", "fpcore" and "latex" (output
/// only). An FPCore result from math input declares the free variables and
/// nothing else.
std::string translate(std::string_view from, std::string_view to, std::string_view text);

}  // namespace fpwb
