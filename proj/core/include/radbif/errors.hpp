#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radbif {

enum class Errc {
  NonFinite,
  InvalidOrder,
  InvalidModel,
  InvalidArgument,
  NotApplicable,
  StepSizeUnderflow,
  NonFiniteState,
  EmptyCurve,
  BracketLost,
  SameClassAtEnds,
  NotNearCritical,
  PreconditionFails,
  Overflow,
  LevelNotReached,
};

std::string_view to_string(Errc code);

/// Single exception type for the library; `code()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace radbif
