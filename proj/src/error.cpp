#include "fragmark/error.hpp"

namespace fragmark {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedPgm: return "MalformedPgm";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidPlaneIndex: return "InvalidPlaneIndex";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BlockOutOfRange: return "BlockOutOfRange";
    case ErrorCode::TagTooLong: return "TagTooLong";
    case ErrorCode::MalformedKeyFile: return "MalformedKeyFile";
    case ErrorCode::MalformedParams: return "MalformedParams";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::DivisibilityError: return "DivisibilityError";
    case ErrorCode::LaOutOfRange: return "LaOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyAssignment: return "EmptyAssignment";
    case ErrorCode::ParamsMismatch: return "ParamsMismatch";
    case ErrorCode::NoSurvivors: return "NoSurvivors";
    case ErrorCode::PermutationSizeMismatch: return "PermutationSizeMismatch";
    case ErrorCode::SearchTooLarge: return "SearchTooLarge";
  }
  return "Unknown";
}

}  // namespace fragmark
