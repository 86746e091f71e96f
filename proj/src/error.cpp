#include "sarceval/error.hpp"

namespace sarceval {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyReference: return "EmptyReference";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::MissingSlotData: return "MissingSlotData";
    case ErrorKind::InvalidTemplate: return "InvalidTemplate";
    case ErrorKind::SidecarUnreachable: return "SidecarUnreachable";
    case ErrorKind::SidecarError: return "SidecarError";
    case ErrorKind::InvalidResponse: return "InvalidResponse";
    case ErrorKind::BackendUnreachable: return "BackendUnreachable";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::MismatchedRuns: return "MismatchedRuns";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<LineViolation>& violations) {
  if (violations.empty()) return "no details";
  std::string out = "line " + std::to_string(violations.front().line) + ": " + violations.front().reason;
  if (violations.size() > 1) out += " (+" + std::to_string(violations.size() - 1) + " more)";
  return out;
}

}  // namespace

SchemaViolation::SchemaViolation(std::vector<LineViolation> violations)
    : Error(ErrorKind::SchemaViolation, summarize(violations)), violations_(std::move(violations)) {}

}  // namespace sarceval
