#include "toral/error.hpp"

namespace toral {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotSquare: return "NotSquare";
    case Errc::DeterminantNotUnit: return "DeterminantNotUnit";
    case Errc::ZeroConstantTerm: return "ZeroConstantTerm";
    case Errc::ToleranceConflict: return "ToleranceConflict";
    case Errc::MissingSubspace: return "MissingSubspace";
    case Errc::ExactUnavailable: return "ExactUnavailable";
    case Errc::AnalyticUnavailable: return "AnalyticUnavailable";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::WeightSumMismatch: return "WeightSumMismatch";
    case Errc::InsufficientLength: return "InsufficientLength";
    case Errc::DomainError: return "DomainError";
    case Errc::InternalInconsistency: return "InternalInconsistency";
    case Errc::NotErgodic: return "NotErgodic";
    case Errc::RegularityUnknown: return "RegularityUnknown";
    case Errc::NotPSD: return "NotPSD";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace toral
