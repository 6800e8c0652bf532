#include "loopsfm/error.h"

namespace loopsfm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kInfeasibleShape:
      return "InfeasibleShape";
    case ErrorCode::kInfeasibleDof:
      return "InfeasibleDof";
    case ErrorCode::kNegativeRadicand:
      return "NegativeRadicand";
    case ErrorCode::kInconsistentFrame:
      return "InconsistentFrame";
    case ErrorCode::kNonPositiveShape:
      return "NonPositiveShape";
    case ErrorCode::kEmptySystem:
      return "EmptySystem";
    case ErrorCode::kUnderdetermined:
      return "Underdetermined";
    case ErrorCode::kNonPhysical:
      return "NonPhysical";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

LoopError::LoopError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace loopsfm
