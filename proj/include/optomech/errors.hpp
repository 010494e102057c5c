#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optomech {

enum class ErrorCode {
  InvalidArgument,
  DegenerateInput,
  ConfigError,
  OutOfBounds,
  TooShort,
  NonUniform,
  UnstableSpring,
  Unstable,
  GridTooCoarse,
  AdiabaticityViolation,
  StepTooLarge,
  NonFinite,
  NoPeak,
  SlopeVanishes,
  NodeDivergence,
  InsufficientData,
  Ambiguous,
  Io,
};

std::string_view to_string(ErrorCode code);

// Process exit status for a failure of this kind: 1 validation, 2 numerical, 3 IO.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

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

}  // namespace optomech
