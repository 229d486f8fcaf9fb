#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wxdiag/balance.hpp"
#include "wxdiag/climatology.hpp"
#include "wxdiag/grid.hpp"

namespace wxdiag {

/// Target shell energies; energy[k - 1] is E(k) for k = 1..energy.size().
struct SpectralRecipe {
  std::vector<double> energy;
  std::uint64_t seed = 0;
};

/// E(k) = amplitude * k^exponent for k_min <= k <= k_max, zero below k_min.
SpectralRecipe power_law_recipe(double exponent, int k_max, double amplitude = 1.0, int k_min = 1,
                                std::uint64_t seed = 0);

/// Random-phase field whose isotropic spectrum equals the recipe shell by
/// shell (every mode in a shell gets the same magnitude). The grid must not
/// contain pole rows. Throws GridTooCoarse when the recipe outruns k_max.
ScalarField field_with_spectrum(const SpectralRecipe& recipe, const GridPtr& grid, FieldMeta meta = {});

/// Like field_with_spectrum, but coefficients are complex Gaussian so each
/// shell energy equals the recipe only in expectation.
ScalarField gaussian_field_with_spectrum(const SpectralRecipe& recipe, const GridPtr& grid, FieldMeta meta = {});

struct SyntheticEnsemble {
  ScalarField mean;
  std::vector<ScalarField> members;
};

/// Members are the fixed mean field plus independent Gaussian perturbations
/// with expected shell energy var_recipe; the ensemble deficit relative to
/// the member spectra is therefore var_recipe in expectation.
SyntheticEnsemble ensemble_with_conditional_variance(const SpectralRecipe& mean_recipe,
                                                     const SpectralRecipe& var_recipe, std::size_t members,
                                                     const GridPtr& grid);

/// truth = A cos(l0 lon), forecast = A cos(l0 (lon - shift)) on every row.
std::pair<ScalarField, ScalarField> shifted_wave_pair(double amplitude, int l0, double shift_rad,
                                                      const GridPtr& grid);

/// A^2 (1 - cos(l0 shift)).
double double_penalty_mse(double amplitude, int l0, double shift_rad) noexcept;

struct BalancedState {
  ScalarField u500;
  ScalarField v500;
  ScalarField u850;
  ScalarField v850;
  ScalarField z500;
  ScalarField z850;
  ScalarField t_layer;
};

/// Smooth z500 and layer temperature; z850 from the hypsometric relation and
/// winds at both levels from the discrete geostrophic stencil.
BalancedState balanced_state(const GridPtr& grid, const PhysicalConstants& c = {});

/// Adds white Gaussian noise to (u, v) so that the noise RMS is rho times
/// the RMS of the perturbed wind over the midlatitude mask.
std::pair<ScalarField, ScalarField> perturb_winds(const ScalarField& u, const ScalarField& v, double rho,
                                                  std::uint64_t seed, const PhysicalConstants& c = {});

/// exp(gamma * lead_days) for each lead.
std::vector<double> drifting_ke_series(double gamma_per_day, std::span<const int> lead_hours);

/// Independent N(0, sd^2) values at every point.
ScalarField white_noise(const GridPtr& grid, double sd, std::uint64_t seed, FieldMeta meta = {});

/// e_m = shared + eta_m with white shared (sd_shared) and model noise (sd_noise).
std::vector<ScalarField> shared_plus_noise_errors(const GridPtr& grid, std::size_t models, double sd_shared,
                                                  double sd_noise, std::uint64_t seed);

/// Closed-form ECR of shared_plus_noise_errors in the large-grid limit.
double shared_plus_noise_ecr(std::size_t models, double sd_shared, double sd_noise) noexcept;

/// One slot per listed day of year (hour-agnostic) with constant mu and sigma.
Climatology uniform_climatology(const GridPtr& grid, const std::string& variable, double mu, double sigma,
                                std::span<const int> days_of_year);

struct PlantedTail {
  ScalarField forecast;
  ScalarField verify;
  Climatology clim;
};

struct PlantedTailOptions {
  double mu = 280.0;
  double sigma = 1.0;
  double nu = 4.0;         ///< Student-t degrees of freedom of the anomalies
  double noise_sd = 0.1;   ///< forecast noise in sigma units
  double threshold = 2.0;
};

/// verify = mu + sigma t_nu; forecast = verify - alpha sigma max(0, delta - 2)
/// + noise. The climatology covers the single valid day used.
PlantedTail planted_tail_bias(double alpha, const GridPtr& grid, std::uint64_t seed,
                              const PlantedTailOptions& options = {});

struct SyntheticDatasetOptions {
  std::size_t nlat = 32;
  std::size_t nlon = 64;
  std::size_t inits = 3;
  int lead_step_hours = 24;
  int max_lead_hours = 120;
  std::uint64_t seed = 42;
};

/// Writes WXG1 fields, forecast/verification/climatology manifests and a
/// run config (config.json) under `dir`. Returns the config path.
std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const SyntheticDatasetOptions& options = {});

}  // namespace wxdiag
