#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loopsfm {

enum class ErrorCode {
  kInvalidArgument,
  kInfeasibleShape,
  kInfeasibleDof,
  kNegativeRadicand,
  kInconsistentFrame,
  kNonPositiveShape,
  kEmptySystem,
  kUnderdetermined,
  kNonPhysical,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every library failure is reported through this type; callers that need to
// distinguish cases switch on code().
class LoopError : public std::runtime_error {
 public:
  LoopError(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace loopsfm
