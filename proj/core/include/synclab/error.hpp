#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace synclab {

enum class ErrorKind {
  InvalidArgument,
  NonFiniteState,
  StepUnderflow,
  OutOfRange,
  NotSymmetric,
  NoConvergence,
  TransientEscape,
  DegenerateMultiplier,
  PeriodMismatch,
  NonUniqueMin,
  DomainExceeded,
  GainTooSmall,
  SingularB,
  UnknownModel,
  ConfigError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Exception type used throughout the library. The kind lets callers (the CLI
/// in particular) map failures onto exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace synclab
