#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dlgain {

enum class ErrorCode {
  kNotPsd,
  kSingular,
  kRankDeficient,
  kConfigInvalid,
  kBelowMinDistance,
  kNonConvergentShadowing,
  kDegenerateChannel,
  kInsufficientAntennas,
  kWrongMode,
  kModelNotLoaded,
  kDimensionMismatch,
  kDiverged,
  kFormatVersionMismatch,
  kCorruptFile,
  kEmptySample,
  kDegenerateMoments,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dlgain
