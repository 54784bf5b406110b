#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smishaug {

enum class ErrorKind {
  Io,
  Parse,
  Invalid,
  Config,
  Gateway,
  ReplayMiss,
  MalformedResponse,
  AttemptCap,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Invalid: return "invalid";
    case ErrorKind::Config: return "config";
    case ErrorKind::Gateway: return "gateway";
    case ErrorKind::ReplayMiss: return "replay_miss";
    case ErrorKind::MalformedResponse: return "malformed_response";
    case ErrorKind::AttemptCap: return "attempt_cap";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Carries every violated field so a config can be fixed in one pass.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(ErrorKind::Config, join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace smishaug
