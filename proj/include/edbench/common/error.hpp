#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edbench {

enum class ErrorCode {
  // configuration
  BadConfig,
  MissingFile,
  WrongKind,
  // data
  MissingColumn,
  MalformedRow,
  BadTimestamp,
  UnknownVersion,
  AllMissingColumn,
  MissingValue,
  NoBand,
  BadAcuity,
  NonFiniteLoss,
  OneClassOnly,
  NoPositives,
  ResampleExhausted,
  // integrity
  DuplicateKey,
  ManifestMismatch,
};

enum class ErrorCategory { Config, Data, Integrity };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Process exit status for a failure category: 2 config, 3 data, 4 integrity.
int exit_code_for(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// The message without the leading code name that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace edbench
