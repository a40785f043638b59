#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simrt {

enum class ErrorCode {
  ParseError,
  MissingCost,
  NegativeValue,
  BadInterval,
  InvalidScenario,
  UnresolvableCost,
  InvalidRate,
  UnderflowRelease,
  NotFound,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name (e.g. "MissingCost: sobel@DSP").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace simrt
