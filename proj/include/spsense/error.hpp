#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spsense {

/// Failure categories. Each one maps to its own CLI exit code.
enum class ErrorCode : int {
  EmptyMatrix = 1,
  MaxPivotsTooLarge,
  RankTooLarge,
  DimensionMismatch,
  NonFiniteValue,
  TooManyModes,
  InfeasibleSparsity,
  ZeroDictionary,
  NonPositiveAlpha,
  NegativeCost,
  SingleClass,
  EmptyClass,
  NotFitted,
  OutOfRange,
  IndexOutOfRange,
  NoSensorsSelected,
  FileNotFound,
  ParseError,
  LabelColumnMissing,
  InvalidParams,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace spsense
