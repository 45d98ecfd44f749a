#include "fpwb/error.hpp"

namespace fpwb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::UnboundVariable: return "unbound_variable";
    case ErrorCode::InvalidRange: return "invalid_range";
    case ErrorCode::JobNotFound: return "job_not_found";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::UnsupportedConstruct: return "unsupported_construct";
    case ErrorCode::EmptySample: return "empty_sample";
    case ErrorCode::InvalidPoint: return "invalid_point";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

}  // namespace fpwb
