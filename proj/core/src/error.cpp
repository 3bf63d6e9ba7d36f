#include "scout/error.hpp"

namespace scout {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIncompleteGrid: return "IncompleteGrid";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownConfig: return "UnknownConfig";
    case ErrorCode::kUnknownWorkload: return "UnknownWorkload";
    case ErrorCode::kMissingRecord: return "MissingRecord";
    case ErrorCode::kInvalidRatio: return "InvalidRatio";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kStartOutsideSpace: return "StartOutsideSpace";
    case ErrorCode::kTraceTooShort: return "TraceTooShort";
    case ErrorCode::kTooFewWorkloads: return "TooFewWorkloads";
    case ErrorCode::kInvalidValues: return "InvalidValues";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kModelFormat: return "ModelFormat";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace scout
