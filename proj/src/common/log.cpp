#include "edbench/common/log.hpp"

namespace edbench {

std::string_view severity_prefix(Severity severity) {
  switch (severity) {
    case Severity::Info: return "INFO";
    case Severity::Warning: return "WARN";
    case Severity::Error: return "ERROR";
  }
  return "INFO";
}

void IssueLog::record(Severity severity, std::string_view code, std::string message) {
  std::lock_guard lock(mutex_);
  auto it = counts_.find(code);
  if (it == counts_.end()) it = counts_.emplace(std::string(code), 0).first;
  const std::size_t seen = it->second++;
  if (echo_ && seen < cap_) {
    *echo_ << severity_prefix(severity) << " [" << code << "] " << message << '\n';
  }
  if (seen < cap_) issues_.push_back({severity, std::string(code), std::move(message)});
}

std::size_t IssueLog::count(std::string_view code) const {
  std::lock_guard lock(mutex_);
  auto it = counts_.find(code);
  return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, std::size_t> IssueLog::counts() const {
  std::lock_guard lock(mutex_);
  return {counts_.begin(), counts_.end()};
}

std::vector<Issue> IssueLog::issues() const {
  std::lock_guard lock(mutex_);
  return issues_;
}

std::string IssueLog::text() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& issue : issues_) {
    out += severity_prefix(issue.severity);
    out += " [";
    out += issue.code;
    out += "] ";
    out += issue.message;
    out += '\n';
  }
  return out;
}

}  // namespace edbench
