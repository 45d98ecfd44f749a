#pragma once

// Internal: thin RAII owner for an mpfr_t. Not part of the public headers so
// that consumers of fpwb_core do not need mpfr.h.

#include <mpfr.h>

#include <string_view>
#include <utility>

#include "fpwb/expr.hpp"

namespace fpwb::detail {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
    inexact = other.inexact;
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_swap(v_, other.v_);
    inexact = other.inexact;
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
      inexact = other.inexact;
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    std::swap(inexact, other.inexact);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_regular() const { return mpfr_regular_p(v_) != 0; }
  mpfr_exp_t exponent() const { return mpfr_get_exp(v_); }

  /// Set when this value or anything it was computed from was rounded.
  bool inexact = false;

 private:
  mpfr_t v_;
};

/// Widest exponent range MPFR allows, so that no intermediate of a binary64
/// input overflows or underflows. Applies to the calling thread.
void widen_exponent_range();

/// Sets `out` to the literal at `out`'s precision, correctly rounded.
void set_literal(BigFloat& out, const Expr& literal);

/// Applies a real-valued operator at `out`'s precision. Domain errors
/// (including division by an exact zero) leave NaN in `out`. Returns the
/// MPFR ternary value: zero when the result is exact.
int apply_exact(Op op, const BigFloat* args, std::size_t n, BigFloat& out);

/// Exact comparison; returns false and sets `invalid` when an operand is NaN.
bool compare_exact(Op op, const BigFloat& a, const BigFloat& b, bool& invalid);

}  // namespace fpwb::detail
