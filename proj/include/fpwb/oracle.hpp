#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fpwb/expr.hpp"

namespace fpwb {

/// Variable assignment for a single evaluation.
using Point = std::map<std::string, double, std::less<>>;

/// Strict left-to-right binary64 evaluation, round-to-nearest-even.
/// Unbound variables throw UnboundVariable.
double eval_float64(const Expr& e, const Point& point);

/// Applies one real-valued operator in binary64.
double apply_float(Op op, std::span<const double> args);
/// Binary64 value of a literal (correctly rounded).
double literal_value(const Expr& literal);

/// Flattened form of an expression for evaluating the same expression at many
/// points. Variables are resolved against the slot order given at compile time.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const std::vector<std::string>& slots);
  double eval(std::span<const double> values) const;

 private:
  struct Instr {
    Op op;
    std::uint32_t slot = 0;
    double constant = 0.0;
  };
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

/// Real-number value of an expression at a point, rounded to binary64.
struct ExactValue {
  enum class Kind { Finite, PosInf, NegInf, Invalid, Unsamplable };
  Kind kind = Kind::Invalid;
  /// Correct rounding of the real value (±inf past the binary64 range).
  /// For Unsamplable it is the last, unconfirmed rounding; NaN for Invalid.
  double rounded = 0.0;
  /// Working precision at which the rounding was confirmed.
  int precision = 0;

  bool valid() const {
    return kind == Kind::Finite || kind == Kind::PosInf || kind == Kind::NegInf;
  }
};

struct OracleOptions {
  int start_precision = 80;
  int max_precision = 16384;
};

/// The working precisions tried, in order: start, doubled each step,
/// clipped at the cap.
std::vector<int> precision_ladder(const OracleOptions& options = {});

/// Evaluates with escalating precision until the binary64 rounding is the
/// same at two consecutive precisions. Domain errors are Invalid; failure to
/// settle below the cap is Unsamplable.
ExactValue eval_exact(const Expr& e, const Point& point, const OracleOptions& options = {});
ExactValue eval_exact(const Expr& e, const std::vector<std::string>& slots,
                      std::span<const double> values, const OracleOptions& options = {});

/// Evaluates at one fixed precision; used by escalation checks.
ExactValue eval_exact_at(const Expr& e, const Point& point, int precision);

/// Bits of error of the float evaluation against the rounded exact value.
/// Throws InvalidPoint when the exact value is Invalid or Unsamplable.
double error_at(const Expr& e, const Point& point);

/// Process-wide instrumentation, used to verify caching.
struct OracleCounters {
  std::atomic<std::uint64_t> exact_evaluations{0};
};
OracleCounters& oracle_counters();

}  // namespace fpwb
