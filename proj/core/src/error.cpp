#include "synclab/error.hpp"

namespace synclab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TransientEscape: return "TransientEscape";
    case ErrorKind::DegenerateMultiplier: return "DegenerateMultiplier";
    case ErrorKind::PeriodMismatch: return "PeriodMismatch";
    case ErrorKind::NonUniqueMin: return "NonUniqueMin";
    case ErrorKind::DomainExceeded: return "DomainExceeded";
    case ErrorKind::GainTooSmall: return "GainTooSmall";
    case ErrorKind::SingularB: return "SingularB";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace synclab
