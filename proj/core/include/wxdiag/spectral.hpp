#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "wxdiag/grid.hpp"

namespace wxdiag {

inline constexpr int kSfiMaxWavenumber = 200;
inline constexpr double kHalfPowerRatio = 0.5;
inline constexpr double kEffectiveResolutionScale = 300.0;
/// A grid must resolve at least this many complete shells.
inline constexpr int kMinResolvedWavenumber = 8;

/// Shell energies E(k) for k = 1..k_max. Energy from FFT bins whose radial
/// shell lies beyond k_max (the corners of the 2D spectrum) is kept in
/// unresolved_energy so that total_energy() satisfies Parseval.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::vector<double> energy, double unresolved_energy = 0.0);

  int k_max() const noexcept { return static_cast<int>(energy_.size()); }
  double energy(int k) const { return energy_.at(static_cast<std::size_t>(k - 1)); }
  std::span<const double> energies() const noexcept { return energy_; }
  double unresolved_energy() const noexcept { return unresolved_; }
  double total_energy() const noexcept;

 private:
  std::vector<double> energy_;
  double unresolved_ = 0.0;
};

/// Radial shell assignment for a (rows x cols) FFT. Frequencies are in cycles
/// per domain along each axis; shell k = round(sqrt(kx^2 + ky^2)).
/// k_max = floor(max(rows, cols) / 2); shells above min(rows, cols)/2 are
/// only partially populated.
class ShellLayout {
 public:
  ShellLayout(std::size_t rows, std::size_t cols);

  static int signed_frequency(std::size_t index, std::size_t n) noexcept;

  int shell(std::size_t r, std::size_t c) const noexcept { return shells_[r * cols_ + c]; }
  int k_max() const noexcept { return k_max_; }
  int mode_count(int k) const { return counts_.at(static_cast<std::size_t>(k)); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  int k_max_;
  std::vector<int> shells_;
  std::vector<int> counts_;
};

/// Normalised 2D DFT coefficients (divided by N) of sqrt(cos lat) * values
/// after removing the mean of the weighted field. Row-major (nlat x nlon).
std::vector<std::complex<double>> weighted_coefficients(const LatLonGrid& grid,
                                                        std::span<const double> values);

/// Mean of the squared, mean-removed sqrt(cos lat)-weighted field; the
/// quantity a spectrum's total energy reproduces.
double weighted_variance(const LatLonGrid& grid, std::span<const double> values);

/// Throws GridTooCoarse when fewer than kMinResolvedWavenumber complete
/// shells fit, InvalidGrid when latitudes are not uniformly spaced.
Spectrum isotropic_spectrum(const LatLonGrid& grid, std::span<const double> values);
Spectrum isotropic_spectrum(const ScalarField& field);

/// Shell-binned |c|^2 of a coefficient array laid out as weighted_coefficients.
Spectrum bin_shells(const ShellLayout& layout, std::span<const std::complex<double>> coefficients);

/// Energy average over e.g. initialisation dates. Throws ShellMismatch.
Spectrum mean_spectrum(std::span<const Spectrum> spectra);

struct SpectralRatio {
  std::vector<int> wavenumbers;
  std::vector<double> ratio;
  /// Shells skipped because the verification energy is zero.
  std::vector<int> flagged;
};

SpectralRatio spectral_ratio(const Spectrum& forecast, const Spectrum& verify);

/// Spectral Fidelity Index: 1 - mean |log10(E_f/E_a)| / 2 over shells
/// 1..200 where both energies are positive, clamped to [0, 1].
/// Throws InsufficientSpectrum when no shell qualifies.
double sfi(const Spectrum& forecast, const Spectrum& verify);

struct EffectiveResolution {
  int wavenumber = 0;       ///< highest k with E_f/E_a >= 0.5 (0 if none)
  double normalized = 0.0;  ///< min(1, wavenumber / 300)
};

/// Uses the highest qualifying shell even if the ratio dipped below the
/// threshold at lower k, so spectral inflation saturates the score.
EffectiveResolution effective_resolution(const Spectrum& forecast, const Spectrum& verify);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log E against log k over [k_lo, k_hi].
PowerLawFit fit_power_law(const Spectrum& spectrum, int k_lo, int k_hi);

struct ConditionalVarianceSpectrum {
  Spectrum variance;
  int lead_hours = 0;
};

/// Shell-binned spread of member coefficients about the ensemble-mean
/// coefficients, with an (M - 1) denominator. Throws InsufficientEnsemble.
ConditionalVarianceSpectrum conditional_variance_spectrum(std::span<const ScalarField> ensemble);

enum class LossFamily { mse, crps, score };

LossFamily parse_loss_family(std::string_view name);
std::string_view to_string(LossFamily loss) noexcept;

/// SFI expected before training from the loss-dependent energy ratio:
/// mse 1 - Var/E, crps 1, score 1 + noise/E. Throws InconsistentVariance
/// when an mse variance exceeds the truth energy.
double predicted_sfi(LossFamily loss, const ConditionalVarianceSpectrum& variance, const Spectrum& truth,
                     const Spectrum* sample_noise = nullptr);

}  // namespace wxdiag
