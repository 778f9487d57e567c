#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fragmark {

enum class ErrorCode {
  FileNotFound,
  MalformedPgm,
  Io,
  InvalidPlaneIndex,
  LengthMismatch,
  BlockOutOfRange,
  TagTooLong,
  MalformedKeyFile,
  MalformedParams,
  ConstraintViolation,
  DivisibilityError,
  LaOutOfRange,
  DimensionMismatch,
  EmptyAssignment,
  ParamsMismatch,
  NoSurvivors,
  PermutationSizeMismatch,
  SearchTooLarge,
};

// Stable identifier used in CLI diagnostics (`error:<code>:...`).
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fragmark
