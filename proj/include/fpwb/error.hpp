#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpwb {

/// Stable machine-readable failure categories. The string forms are part of
/// the HTTP wire contract and must not change.
enum class ErrorCode {
  ParseError,
  UnboundVariable,
  InvalidRange,
  JobNotFound,
  Timeout,
  UnsupportedConstruct,
  EmptySample,
  InvalidPoint,
  NotFound,
  Degenerate,
  Divergence,
  BadRequest,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Byte range in the source text that an error refers to.
struct SourceSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<SourceSpan> span = std::nullopt,
        std::vector<std::string> expected = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        span_(span),
        expected_(std::move(expected)) {}

  ErrorCode code() const { return code_; }
  const std::optional<SourceSpan>& span() const { return span_; }
  // Tokens the parser would have accepted at span().offset.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
  std::vector<std::string> expected_;
};

}  // namespace fpwb
