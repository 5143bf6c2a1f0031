#pragma once

#include <stdexcept>
#include <string>

namespace oamsim {

// All recoverable failures carry a machine-readable category that the CLI
// maps to an exit code and a JSON error object.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

struct ConfigParseError : Error {
  explicit ConfigParseError(const std::string& m) : Error("config_parse", m) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error("validation", m) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};
struct UnreachableChargeError : Error {
  explicit UnreachableChargeError(const std::string& m) : Error("unreachable_charge", m) {}
};
struct AmbiguousAlignmentError : Error {
  explicit AmbiguousAlignmentError(const std::string& m) : Error("ambiguous_alignment", m) {}
};
struct UnknownChargeError : Error {
  explicit UnknownChargeError(const std::string& m) : Error("unknown_charge", m) {}
};
struct DegenerateHistogramError : Error {
  explicit DegenerateHistogramError(const std::string& m) : Error("degenerate_histogram", m) {}
};
struct SpanTooSmallError : Error {
  explicit SpanTooSmallError(const std::string& m) : Error("span_too_small", m) {}
};
struct UnsortedInputError : Error {
  explicit UnsortedInputError(const std::string& m) : Error("unsorted_input", m) {}
};
struct InfeasibleCalibrationError : Error {
  explicit InfeasibleCalibrationError(const std::string& m) : Error("infeasible_calibration", m) {}
};
struct IoError : Error {
  explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace oamsim
