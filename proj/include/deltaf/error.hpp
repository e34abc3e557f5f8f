#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace deltaf {

enum class ErrorCode {
  kDimensionMismatch,
  kNonFinite,
  kNotSPD,
  kSingularBlock,
  kRankDeficient,
  kSingularW,
  kSingularH,
  kNearPiRotation,
  kIndexOutOfRange,
  kEvaluationFailure,
  kNoConvergence,
  kIo,
  kParse,
  kInvalidArgument,
};

/// Stable machine-readable name, e.g. "NotSPD".
std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace deltaf
