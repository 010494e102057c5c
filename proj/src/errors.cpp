#include "optomech/errors.hpp"

namespace optomech {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonUniform: return "NonUniform";
    case ErrorCode::UnstableSpring: return "UnstableSpring";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::AdiabaticityViolation: return "AdiabaticityViolation";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoPeak: return "NoPeak";
    case ErrorCode::SlopeVanishes: return "SlopeVanishes";
    case ErrorCode::NodeDivergence: return "NodeDivergence";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DegenerateInput:
    case ErrorCode::ConfigError:
    case ErrorCode::OutOfBounds:
    case ErrorCode::TooShort:
    case ErrorCode::NonUniform:
      return 1;
    case ErrorCode::Io:
      return 3;
    default:
      return 2;
  }
}

}  // namespace optomech
