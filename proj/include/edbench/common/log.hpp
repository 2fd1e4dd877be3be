#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace edbench {

enum class Severity { Info, Warning, Error };

struct Issue {
  Severity severity;
  std::string code;
  std::string message;
};

/// Append-only issue sink shared by every stage. Lines are written as
/// `WARN [code] message`; counts per code end up in the run manifest.
class IssueLog {
 public:
  IssueLog() = default;
  explicit IssueLog(std::ostream* echo) : echo_(echo) {}

  void record(Severity severity, std::string_view code, std::string message);
  void info(std::string_view code, std::string message) {
    record(Severity::Info, code, std::move(message));
  }
  void warn(std::string_view code, std::string message) {
    record(Severity::Warning, code, std::move(message));
  }

  std::size_t count(std::string_view code) const;
  std::map<std::string, std::size_t> counts() const;
  std::vector<Issue> issues() const;
  std::string text() const;

  /// Keeps at most this many messages per code in memory; counts stay exact.
  void set_message_cap(std::size_t cap) { cap_ = cap; }

 private:
  mutable std::mutex mutex_;
  std::ostream* echo_ = nullptr;
  std::size_t cap_ = 1000;
  std::vector<Issue> issues_;
  std::map<std::string, std::size_t, std::less<>> counts_;
};

std::string_view severity_prefix(Severity severity);

}  // namespace edbench
