#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wxdiag/grid.hpp"

namespace wxdiag {

/// Error field e = forecast - verify, carrying the forecast's metadata.
ScalarField error_field(const ScalarField& forecast, const ScalarField& verify);

/// Error Consensus Ratio of M >= 2 error fields on one grid:
/// <|ebar|^2> / (<|ebar|^2> + mean_m <|e_m - ebar|^2>), area-weighted.
/// Throws InsufficientEnsemble, GridMismatch, DegenerateErrors.
double ecr(std::span<const ScalarField> errors);

/// Area-weighted Pearson correlation. Throws DegenerateField on zero variance.
double weighted_correlation(const LatLonGrid& grid, std::span<const double> a, std::span<const double> b);

/// Mean weighted correlation over all model pairs of the raw error fields.
double pairwise_error_correlation(std::span<const ScalarField> errors);

enum class PairGroup { all, within_family, cross_family };

std::string_view to_string(PairGroup group) noexcept;

/// Index pairs (i < j) selected by family tag.
std::vector<std::pair<std::size_t, std::size_t>> select_pairs(std::span<const std::string> families,
                                                              PairGroup group);

struct MedCurve {
  std::vector<int> wavenumbers;
  std::vector<double> med;
  /// Shells where every selected pair had zero energy in both spectra.
  std::vector<int> flagged;
  std::size_t pairs = 0;
};

/// Model Error Divergence per shell: mean over the selected pairs of
/// |E1 - E2| / (E1 + E2) of the error spectra. A pair whose two spectra are
/// both zero at a shell is left out of that shell's mean.
MedCurve med(std::span<const ScalarField> errors, std::span<const std::pair<std::size_t, std::size_t>> pairs);

}  // namespace wxdiag
