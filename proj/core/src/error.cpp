#include "dlgain/error.hpp"

namespace dlgain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kBelowMinDistance: return "BelowMinDistance";
    case ErrorCode::kNonConvergentShadowing: return "NonConvergentShadowing";
    case ErrorCode::kDegenerateChannel: return "DegenerateChannel";
    case ErrorCode::kInsufficientAntennas: return "InsufficientAntennas";
    case ErrorCode::kWrongMode: return "WrongMode";
    case ErrorCode::kModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kFormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kDegenerateMoments: return "DegenerateMoments";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace dlgain
