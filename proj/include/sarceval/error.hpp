#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sarceval {

enum class ErrorKind {
  MissingFile,
  SchemaViolation,
  DuplicateId,
  EmptyDataset,
  EmptyInput,
  LengthMismatch,
  EmptyReference,
  TooFewSamples,
  MissingSlotData,
  InvalidTemplate,
  SidecarUnreachable,
  SidecarError,
  InvalidResponse,
  BackendUnreachable,
  AuthError,
  RateLimited,
  TransportError,
  MalformedResponse,
  ConfigError,
  MismatchedRuns,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure the harness reports. The kind is the
/// contract; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct LineViolation {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

class SchemaViolation : public Error {
 public:
  explicit SchemaViolation(std::vector<LineViolation> violations);
  SchemaViolation(std::size_t line, std::string reason)
      : SchemaViolation(std::vector<LineViolation>{{line, std::move(reason)}}) {}

  const std::vector<LineViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<LineViolation> violations_;
};

/// Carries the HTTP status and body from a detector sidecar failure.
class SidecarError : public Error {
 public:
  SidecarError(int status, std::string body)
      : Error(ErrorKind::SidecarError, "status " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}

  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace sarceval
