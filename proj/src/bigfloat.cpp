#include "bigfloat.hpp"

#include <gmp.h>

#include "fpwb/error.hpp"

namespace fpwb::detail {

void widen_exponent_range() {
  mpfr_set_emin(mpfr_get_emin_min());
  mpfr_set_emax(mpfr_get_emax_max());
}

void set_literal(BigFloat& out, const Expr& literal) {
  switch (literal.op()) {
    case Op::Pi:
      mpfr_const_pi(out.get(), MPFR_RNDN);
      out.inexact = true;
      return;
    case Op::E:
      mpfr_set_ui(out.get(), 1, MPFR_RNDN);
      mpfr_exp(out.get(), out.get(), MPFR_RNDN);
      out.inexact = true;
      return;
    case Op::Infinity:
      mpfr_set_inf(out.get(), 1);
      out.inexact = false;
      return;
    case Op::Num:
      break;
    default:
      throw Error(ErrorCode::Internal, "set_literal on a non-literal");
  }
  const std::string& text = literal.text();
  if (is_rational_literal(text)) {
    mpq_t q;
    mpq_init(q);
    std::string t = text[0] == '+' ? text.substr(1) : text;
    mpq_set_str(q, t.c_str(), 10);
    mpq_canonicalize(q);
    if (mpz_sgn(mpq_denref(q)) == 0) {
      mpfr_set_nan(out.get());
    } else {
      out.inexact = mpfr_set_q(out.get(), q, MPFR_RNDN) != 0;
    }
    mpq_clear(q);
    return;
  }
  out.inexact = mpfr_strtofr(out.get(), text.c_str(), nullptr, 10, MPFR_RNDN) != 0;
}

int apply_exact(Op op, const BigFloat* a, std::size_t n, BigFloat& out) {
  mpfr_ptr r = out.get();
  auto x = [&](std::size_t i) { return a[i].get(); };
  if (n < static_cast<std::size_t>(op_info(op).arity)) {
    throw Error(ErrorCode::Internal, "operator arity mismatch in exact evaluation");
  }
  constexpr auto rnd = MPFR_RNDN;
  int t = 0;
  switch (op) {
    case Op::Neg: t = mpfr_neg(r, x(0), rnd); break;
    case Op::Add: t = mpfr_add(r, x(0), x(1), rnd); break;
    case Op::Sub: t = mpfr_sub(r, x(0), x(1), rnd); break;
    case Op::Mul: t = mpfr_mul(r, x(0), x(1), rnd); break;
    case Op::Div:
      if (a[1].is_zero()) {
        mpfr_set_nan(r);
      } else {
        t = mpfr_div(r, x(0), x(1), rnd);
      }
      break;
    case Op::Sqrt: t = mpfr_sqrt(r, x(0), rnd); break;
    case Op::Cbrt: t = mpfr_cbrt(r, x(0), rnd); break;
    case Op::Fabs: t = mpfr_abs(r, x(0), rnd); break;
    case Op::Exp: t = mpfr_exp(r, x(0), rnd); break;
    case Op::Expm1: t = mpfr_expm1(r, x(0), rnd); break;
    case Op::Log: t = mpfr_log(r, x(0), rnd); break;
    case Op::Log1p: t = mpfr_log1p(r, x(0), rnd); break;
    case Op::Pow:
      if (a[0].is_zero() && mpfr_sgn(x(1)) < 0) {
        mpfr_set_nan(r);  // pole
      } else {
        t = mpfr_pow(r, x(0), x(1), rnd);
      }
      break;
    case Op::Hypot: t = mpfr_hypot(r, x(0), x(1), rnd); break;
    case Op::Fma: t = mpfr_fma(r, x(0), x(1), x(2), rnd); break;
    case Op::Sin: t = mpfr_sin(r, x(0), rnd); break;
    case Op::Cos: t = mpfr_cos(r, x(0), rnd); break;
    case Op::Tan: t = mpfr_tan(r, x(0), rnd); break;
    case Op::Asin: t = mpfr_asin(r, x(0), rnd); break;
    case Op::Acos: t = mpfr_acos(r, x(0), rnd); break;
    case Op::Atan: t = mpfr_atan(r, x(0), rnd); break;
    case Op::Atan2: t = mpfr_atan2(r, x(0), x(1), rnd); break;
    case Op::Sinh: t = mpfr_sinh(r, x(0), rnd); break;
    case Op::Cosh: t = mpfr_cosh(r, x(0), rnd); break;
    case Op::Tanh: t = mpfr_tanh(r, x(0), rnd); break;
    case Op::Asinh: t = mpfr_asinh(r, x(0), rnd); break;
    case Op::Acosh: t = mpfr_acosh(r, x(0), rnd); break;
    case Op::Atanh: t = mpfr_atanh(r, x(0), rnd); break;
    default:
      throw Error(ErrorCode::Internal,
                  "apply_exact on non-arithmetic operator " + std::string(op_info(op).name));
  }
  bool inexact = t != 0;
  for (std::size_t i = 0; i < n; ++i) inexact = inexact || a[i].inexact;
  out.inexact = inexact;
  return t;
}

bool compare_exact(Op op, const BigFloat& a, const BigFloat& b, bool& invalid) {
  if (a.is_nan() || b.is_nan()) {
    invalid = true;
    return false;
  }
  int c = mpfr_cmp(a.get(), b.get());
  switch (op) {
    case Op::Lt: return c < 0;
    case Op::Le: return c <= 0;
    case Op::Gt: return c > 0;
    case Op::Ge: return c >= 0;
    case Op::Eq: return c == 0;
    default: throw Error(ErrorCode::Internal, "compare_exact on non-comparison");
  }
}

}  // namespace fpwb::detail
