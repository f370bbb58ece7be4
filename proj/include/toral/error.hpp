#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toral {

enum class Errc {
  NotSquare,
  DeterminantNotUnit,
  ZeroConstantTerm,
  ToleranceConflict,
  MissingSubspace,
  ExactUnavailable,
  AnalyticUnavailable,
  UnsupportedDimension,
  WeightSumMismatch,
  InsufficientLength,
  DomainError,
  InternalInconsistency,
  NotErgodic,
  RegularityUnknown,
  NotPSD,
  InvalidArgument,
  ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code contract) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace toral
