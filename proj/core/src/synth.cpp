#include "wxdiag/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/fft.hpp"
#include "wxdiag/spectral.hpp"

namespace wxdiag {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

enum class Amplitude { exact, gaussian };

// Hermitian coefficient array on the grid's shell layout with shell energies
// given by `energy` (exactly or in expectation).
std::vector<std::complex<double>> shell_coefficients(const ShellLayout& layout, std::span<const double> energy,
                                                     Amplitude mode, std::mt19937_64& rng) {
  const int kk = static_cast<int>(energy.size());
  if (kk > layout.k_max()) {
    throw Error(ErrorKind::GridTooCoarse,
                fmt::format("recipe needs k = {} but the grid supports k <= {}", kk, layout.k_max()));
  }
  const std::size_t rows = layout.rows();
  const std::size_t cols = layout.cols();
  std::vector<std::complex<double>> c(rows * cols, 0.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < cols; ++col) {
      const std::size_t p = r * cols + col;
      const std::size_t q = ((rows - r) % rows) * cols + (cols - col) % cols;
      if (q < p) continue;  // filled as the partner of an earlier mode
      const int k = layout.shell(r, col);
      if (k == 0 || k > kk) continue;
      const double e = energy[static_cast<std::size_t>(k - 1)];
      if (!(e >= 0.0)) throw Error(ErrorKind::NonpositiveEnergy, "negative recipe energy");
      const double v = e / static_cast<double>(layout.mode_count(k));
      if (q == p) {
        const double a = mode == Amplitude::exact ? (coin(rng) ? 1.0 : -1.0) * std::sqrt(v)
                                                  : std::sqrt(v) * normal(rng);
        c[p] = a;
        continue;
      }
      std::complex<double> z;
      if (mode == Amplitude::exact) {
        z = std::polar(std::sqrt(v), phase(rng));
      } else {
        const double s = std::sqrt(v / 2.0);
        const double re = s * normal(rng);
        const double im = s * normal(rng);
        z = {re, im};
      }
      c[p] = z;
      c[q] = std::conj(z);
    }
  }
  return c;
}

// Real field g / sqrt(cos lat) from normalised coefficients of g.
std::vector<double> synthesize(const LatLonGrid& grid, std::vector<std::complex<double>> c) {
  Fft2d fft(grid.nlat(), grid.nlon());
  fft.inverse(c);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double s = 1.0 / std::sqrt(grid.cos_lat(i));
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      out[p] = c[p].real() * s;
    }
  }
  return out;
}

void require_no_poles(const LatLonGrid& grid) {
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    if (grid.is_pole_row(i)) throw Error(ErrorKind::InvalidGrid, "synthetic spectral fields need a grid without pole rows");
  }
}

std::vector<double> random_spectral_values(std::span<const double> energy, const LatLonGrid& grid, Amplitude mode,
                                           std::mt19937_64& rng) {
  require_no_poles(grid);
  const ShellLayout layout(grid.nlat(), grid.nlon());
  return synthesize(grid, shell_coefficients(layout, energy, mode, rng));
}

}  // namespace

SpectralRecipe power_law_recipe(double exponent, int k_max, double amplitude, int k_min, std::uint64_t seed) {
  SpectralRecipe r;
  r.seed = seed;
  r.energy.assign(static_cast<std::size_t>(std::max(k_max, 0)), 0.0);
  for (int k = std::max(k_min, 1); k <= k_max; ++k) {
    r.energy[static_cast<std::size_t>(k - 1)] = amplitude * std::pow(static_cast<double>(k), exponent);
  }
  return r;
}

ScalarField field_with_spectrum(const SpectralRecipe& recipe, const GridPtr& grid, FieldMeta meta) {
  auto rng = make_rng(recipe.seed);
  return ScalarField(grid, random_spectral_values(recipe.energy, *grid, Amplitude::exact, rng), std::move(meta));
}

ScalarField gaussian_field_with_spectrum(const SpectralRecipe& recipe, const GridPtr& grid, FieldMeta meta) {
  auto rng = make_rng(recipe.seed);
  return ScalarField(grid, random_spectral_values(recipe.energy, *grid, Amplitude::gaussian, rng),
                     std::move(meta));
}

SyntheticEnsemble ensemble_with_conditional_variance(const SpectralRecipe& mean_recipe,
                                                     const SpectralRecipe& var_recipe, std::size_t members,
                                                     const GridPtr& grid) {
  if (members < 2) throw Error(ErrorKind::InsufficientEnsemble, "an ensemble needs at least two members");
  SyntheticEnsemble out{field_with_spectrum(mean_recipe, grid), {}};
  const auto& mu = out.mean.values();
  out.members.reserve(members);
  for (std::size_t m = 0; m < members; ++m) {
    auto rng = make_rng(var_recipe.seed, m + 1);
    auto values = random_spectral_values(var_recipe.energy, *grid, Amplitude::gaussian, rng);
    for (std::size_t p = 0; p < values.size(); ++p) values[p] += mu[p];
    FieldMeta meta;
    meta.model = fmt::format("member{:03}", m);
    out.members.emplace_back(grid, std::move(values), std::move(meta));
  }
  return out;
}

std::pair<ScalarField, ScalarField> shifted_wave_pair(double amplitude, int l0, double shift_rad,
                                                      const GridPtr& grid) {
  if (l0 < 0 || 2 * static_cast<std::size_t>(l0) >= grid->nlon()) {
    throw Error(ErrorKind::GridTooCoarse, fmt::format("wavenumber {} not resolvable with {} longitudes", l0, grid->nlon()));
  }
  std::vector<double> truth(grid->size()), forecast(grid->size());
  for (std::size_t i = 0; i < grid->nlat(); ++i) {
    for (std::size_t j = 0; j < grid->nlon(); ++j) {
      const double lon = grid->lons()[j] * kDeg;
      truth[grid->index(i, j)] = amplitude * std::cos(l0 * lon);
      forecast[grid->index(i, j)] = amplitude * std::cos(l0 * (lon - shift_rad));
    }
  }
  return {ScalarField(grid, std::move(truth)), ScalarField(grid, std::move(forecast))};
}

double double_penalty_mse(double amplitude, int l0, double shift_rad) noexcept {
  return amplitude * amplitude * (1.0 - std::cos(l0 * shift_rad));
}

BalancedState balanced_state(const GridPtr& grid, const PhysicalConstants& c) {
  const std::size_t n = grid->size();
  std::vector<double> z500(n), t(n), z850(n);
  const double lnp = std::log(kLowerLevelHpa / kUpperLevelHpa);
  for (std::size_t i = 0; i < grid->nlat(); ++i) {
    const double phi = grid->lat_rad(i);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    for (std::size_t j = 0; j < grid->nlon(); ++j) {
      const double lam = grid->lons()[j] * kDeg;
      const std::size_t p = grid->index(i, j);
      z500[p] = 5600.0 - 350.0 * sphi * sphi + 60.0 * cphi * cphi * std::cos(3.0 * lam + 0.3) +
                25.0 * cphi * sphi * std::sin(5.0 * lam);
      t[p] = 255.0 + 30.0 * cphi * cphi + 4.0 * cphi * std::cos(2.0 * lam - 0.7);
      z850[p] = z500[p] - c.r_dry * t[p] * lnp / c.gravity;
    }
  }
  FieldMeta m500{"z500", "balanced", {}, 0};
  FieldMeta m850{"z850", "balanced", {}, 0};
  ScalarField z5(grid, std::move(z500), m500);
  ScalarField z8(grid, std::move(z850), m850);
  auto w5 = geostrophic_wind(z5, c);
  auto w8 = geostrophic_wind(z8, c);
  auto meta = [](const char* var) { return FieldMeta{var, "balanced", {}, 0}; };
  return BalancedState{ScalarField(grid, std::move(w5.u), meta("u500")),
                       ScalarField(grid, std::move(w5.v), meta("v500")),
                       ScalarField(grid, std::move(w8.u), meta("u850")),
                       ScalarField(grid, std::move(w8.v), meta("v850")),
                       std::move(z5),
                       std::move(z8),
                       ScalarField(grid, std::move(t), meta("t850"))};
}

std::pair<ScalarField, ScalarField> perturb_winds(const ScalarField& u, const ScalarField& v, double rho,
                                                  std::uint64_t seed, const PhysicalConstants& c) {
  if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidField, "noise fraction must lie in [0, 1)");
  const auto& grid = u.grid();
  const auto mask = midlatitude_mask(grid, c);
  std::vector<double> speed2(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) speed2[p] = u.values()[p] * u.values()[p] + v.values()[p] * v.values()[p];
  const double ms = area_weighted_mean(grid, speed2, &mask);
  // <|n|^2> = rho^2 <|v + n|^2> = rho^2 (<|v|^2> + <|n|^2>), two components.
  const double sd = std::sqrt(rho * rho / (1.0 - rho * rho) * ms / 2.0);
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> un(u.values().begin(), u.values().end());
  std::vector<double> vn(v.values().begin(), v.values().end());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    un[p] += normal(rng);
    vn[p] += normal(rng);
  }
  return {u.with_values(std::move(un)), v.with_values(std::move(vn))};
}

std::vector<double> drifting_ke_series(double gamma_per_day, std::span<const int> lead_hours) {
  std::vector<double> out;
  out.reserve(lead_hours.size());
  for (int h : lead_hours) out.push_back(std::exp(gamma_per_day * h / 24.0));
  return out;
}

ScalarField white_noise(const GridPtr& grid, double sd, std::uint64_t seed, FieldMeta meta) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> values(grid->size());
  for (auto& x : values) x = normal(rng);
  return ScalarField(grid, std::move(values), std::move(meta));
}

std::vector<ScalarField> shared_plus_noise_errors(const GridPtr& grid, std::size_t models, double sd_shared,
                                                  double sd_noise, std::uint64_t seed) {
  const auto shared = white_noise(grid, sd_shared, seed);
  std::vector<ScalarField> out;
  for (std::size_t m = 0; m < models; ++m) {
    const auto eta = white_noise(grid, sd_noise, seed + 1000003ULL * (m + 1));
    std::vector<double> e(grid->size());
    for (std::size_t p = 0; p < e.size(); ++p) e[p] = shared.values()[p] + eta.values()[p];
    FieldMeta meta;
    meta.model = fmt::format("model{}", m);
    out.emplace_back(grid, std::move(e), std::move(meta));
  }
  return out;
}

double shared_plus_noise_ecr(std::size_t models, double sd_shared, double sd_noise) noexcept {
  const double s2 = sd_shared * sd_shared;
  const double n2 = sd_noise * sd_noise;
  return (s2 + n2 / static_cast<double>(models)) / (s2 + n2);
}

Climatology uniform_climatology(const GridPtr& grid, const std::string& variable, double mu, double sigma,
                                std::span<const int> days_of_year) {
  Climatology clim(grid, variable);
  for (int doy : days_of_year) {
    clim.set_slot(doy, kAnyHour, std::vector<double>(grid->size(), mu), std::vector<double>(grid->size(), sigma));
  }
  return clim;
}

PlantedTail planted_tail_bias(double alpha, const GridPtr& grid, std::uint64_t seed,
                              const PlantedTailOptions& options) {
  if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidField, "planted alpha must be nonnegative");
  const TimePoint valid = parse_iso8601("2021-07-15T00:00Z");
  const int doy = day_of_year(valid);
  auto rng = make_rng(seed);
  std::student_t_distribution<double> tail(options.nu);
  std::normal_distribution<double> noise(0.0, options.noise_sd * options.sigma);
  std::vector<double> verify(grid->size()), forecast(grid->size());
  for (std::size_t p = 0; p < verify.size(); ++p) {
    const double delta = tail(rng);
    verify[p] = options.mu + options.sigma * delta;
    forecast[p] = verify[p] - alpha * options.sigma * std::max(0.0, delta - options.threshold) + noise(rng);
  }
  FieldMeta vmeta{"t2m", "truth", valid, 0};
  FieldMeta fmeta{"t2m", "planted", valid, 0};
  const int days[] = {doy};
  return PlantedTail{ScalarField(grid, std::move(forecast), fmeta), ScalarField(grid, std::move(verify), vmeta),
                     uniform_climatology(grid, "t2m", options.mu, options.sigma, days)};
}

}  // namespace wxdiag
