#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scout {

// Stable set of failure categories. Names are what the CLI prints before the
// colon on its error line; the numeric order is part of the exit-code mapping.
enum class ErrorCode {
  kParseError,
  kIncompleteGrid,
  kDimensionMismatch,
  kUnknownConfig,
  kUnknownWorkload,
  kMissingRecord,
  kInvalidRatio,
  kEmptyTrainingSet,
  kEmptySamples,
  kKTooLarge,
  kStartOutsideSpace,
  kTraceTooShort,
  kTooFewWorkloads,
  kInvalidValues,
  kEmptyList,
  kIoError,
  kModelFormat,
  kInvalidArgument,
};

inline constexpr int kErrorCodeCount = static_cast<int>(ErrorCode::kInvalidArgument) + 1;

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scout
