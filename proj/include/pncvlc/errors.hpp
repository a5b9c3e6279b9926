#pragma once

#include <stdexcept>
#include <string>

namespace pncvlc {

/// Failure categories. The numeric value doubles as the CLI exit code.
enum class ErrorCategory : int {
  config = 3,
  framing = 4,
  precondition = 5,
  io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Invalid parameter or scenario configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

/// Sizes or layouts that do not fit together.
struct FramingError : Error {
  explicit FramingError(const std::string& what) : Error(ErrorCategory::framing, what) {}
};

/// Caller broke a documented precondition.
struct PreconditionError : Error {
  explicit PreconditionError(const std::string& what)
      : Error(ErrorCategory::precondition, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace pncvlc
