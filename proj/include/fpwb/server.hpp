#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fpwb/error.hpp"
#include "fpwb/session.hpp"

namespace fpwb {

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Maps API requests onto a Workbench. Transport-free so tests can drive it
/// directly; `serve` wires it to HTTP.
class ApiRouter {
 public:
  explicit ApiRouter(Workbench& bench,
                     std::optional<std::filesystem::path> snapshot_dir = std::nullopt)
      : bench_(bench), snapshot_dir_(std::move(snapshot_dir)) {}

  ApiResponse dispatch(std::string_view method, std::string_view path, std::string_view body);

 private:
  Workbench& bench_;
  std::optional<std::filesystem::path> snapshot_dir_;
};

/// HTTP status used for an error code.
int http_status(ErrorCode code);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::filesystem::path> snapshot_dir;
  std::string cors_origin = "*";
};

/// Blocks serving the API until the process is stopped. Returns false when
/// the address cannot be bound.
bool serve(Workbench& bench, const ServeOptions& options);

}  // namespace fpwb
