#include "simrt/error.hpp"

namespace simrt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingCost: return "MissingCost";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::UnresolvableCost: return "UnresolvableCost";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::UnderflowRelease: return "UnderflowRelease";
    case ErrorCode::NotFound: return "NotFound";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace simrt
