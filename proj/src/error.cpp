#include "loopgrating/error.hpp"

namespace loopgrating {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateSteadyState: return "DegenerateSteadyState";
    case ErrorCode::UnstableGain: return "UnstableGain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ResonanceSingularity: return "ResonanceSingularity";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::InconclusiveParity: return "Inconclusive";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DegenerateOrder: return "DegenerateOrder";
    case ErrorCode::BothOrdersDark: return "BothOrdersDark";
    case ErrorCode::WrongSymmetryClass: return "WrongSymmetryClass";
    case ErrorCode::SampleFailure: return "SampleFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownKey:
    case ErrorCode::OutOfRange:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace loopgrating
