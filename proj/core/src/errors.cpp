#include "radbif/errors.hpp"

namespace radbif {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::InvalidOrder: return "InvalidOrder";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::EmptyCurve: return "EmptyCurve";
    case Errc::BracketLost: return "BracketLost";
    case Errc::SameClassAtEnds: return "SameClassAtEnds";
    case Errc::NotNearCritical: return "NotNearCritical";
    case Errc::PreconditionFails: return "PreconditionFails";
    case Errc::Overflow: return "Overflow";
    case Errc::LevelNotReached: return "LevelNotReached";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace radbif
