#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace pas {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kGatewayFailure,     // transport-level failure talking to a provider; retryable
  kRemoteStatus,       // provider answered with a non-2xx status or empty body
  kTimeout,
  kStructuredOutput,   // provider output did not match the requested schema
  kUnsupported,
  kConsistency,
  kIo,
  kSchemaVersion,
  kTargetUnreachable,
  kConflict,
  kInternal,
};

std::string_view to_string(ErrorCode code);
// Status used when an error crosses an HTTP boundary.
int http_status(ErrorCode code);

// Single exception type for the whole library. `detail` carries structured
// context (raw gateway text, field diffs, HTTP status, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::json detail = nullptr)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

  bool retryable() const noexcept {
    return code_ == ErrorCode::kGatewayFailure || code_ == ErrorCode::kTimeout;
  }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

// {"code": "...", "message": "...", "detail": ...}
inline nlohmann::json error_body(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"detail", e.detail()}};
}

}  // namespace pas
