#include "wxdiag/error.hpp"

namespace wxdiag {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidField: return "InvalidField";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ShellMismatch: return "ShellMismatch";
    case ErrorKind::InsufficientSpectrum: return "InsufficientSpectrum";
    case ErrorKind::NonpositiveEnergy: return "NonpositiveEnergy";
    case ErrorKind::InsufficientEnsemble: return "InsufficientEnsemble";
    case ErrorKind::InconsistentVariance: return "InconsistentVariance";
    case ErrorKind::DegenerateAnomaly: return "DegenerateAnomaly";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::DegenerateErrors: return "DegenerateErrors";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::InvalidSeries: return "InvalidSeries";
    case ErrorKind::MissingComponent: return "MissingComponent";
    case ErrorKind::DegenerateFlow: return "DegenerateFlow";
    case ErrorKind::DegenerateShear: return "DegenerateShear";
    case ErrorKind::DegenerateThickness: return "DegenerateThickness";
    case ErrorKind::IncompleteBalance: return "IncompleteBalance";
    case ErrorKind::NoExtremes: return "NoExtremes";
    case ErrorKind::InsufficientTail: return "InsufficientTail";
    case ErrorKind::OutOfRangeMetric: return "OutOfRangeMetric";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::DegenerateRanks: return "DegenerateRanks";
    case ErrorKind::InvalidInformationBudget: return "InvalidInformationBudget";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace wxdiag
