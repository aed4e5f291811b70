#pragma once

#include <stdexcept>
#include <string>

namespace ddo {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptySet,
  DivisorContainsZero,
  NegativeDomain,
  ZeroCoefficient,
  NonpositiveScale,
  ZeroWidthSplit,
  InconsistentMeasurements,
  DomainViolation,
  InitialStateOutsideX0,
  NonpositiveMetric,
};

/// Exception type carrying a machine-readable code alongside the message.
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

}  // namespace ddo
