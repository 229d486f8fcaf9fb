#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wxdiag {

/// Failure categories raised by the diagnostics. Each operation documents
/// which of these it can produce.
enum class ErrorKind {
  InvalidGrid,
  InvalidField,
  GridMismatch,
  FieldMismatch,
  GridTooCoarse,
  ShellMismatch,
  InsufficientSpectrum,
  NonpositiveEnergy,
  InsufficientEnsemble,
  InconsistentVariance,
  DegenerateAnomaly,
  InsufficientHistory,
  InsufficientSamples,
  DegenerateErrors,
  DegenerateField,
  InvalidSeries,
  MissingComponent,
  DegenerateFlow,
  DegenerateShear,
  DegenerateThickness,
  IncompleteBalance,
  NoExtremes,
  InsufficientTail,
  OutOfRangeMetric,
  InvalidWeights,
  DegenerateRanks,
  InvalidInformationBudget,
  FormatError,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wxdiag
