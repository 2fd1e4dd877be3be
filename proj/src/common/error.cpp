#include "edbench/common/error.hpp"

namespace edbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::AllMissingColumn: return "AllMissingColumn";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::NoBand: return "NoBand";
    case ErrorCode::BadAcuity: return "BadAcuity";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::ResampleExhausted: return "ResampleExhausted";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadConfig:
    case ErrorCode::MissingFile:
    case ErrorCode::WrongKind:
      return ErrorCategory::Config;
    case ErrorCode::DuplicateKey:
    case ErrorCode::ManifestMismatch:
      return ErrorCategory::Integrity;
    default:
      return ErrorCategory::Data;
  }
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Integrity: return 4;
  }
  return 1;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

}  // namespace edbench
