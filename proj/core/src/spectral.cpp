#include "wxdiag/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/fft.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

Spectrum::Spectrum(std::vector<double> energy, double unresolved_energy)
    : energy_(std::move(energy)), unresolved_(unresolved_energy) {
  for (double e : energy_) {
    if (!std::isfinite(e) || e < 0.0) throw Error(ErrorKind::NonpositiveEnergy, "negative shell energy");
  }
  if (!std::isfinite(unresolved_) || unresolved_ < 0.0) {
    throw Error(ErrorKind::NonpositiveEnergy, "negative unresolved energy");
  }
}

double Spectrum::total_energy() const noexcept {
  return std::accumulate(energy_.begin(), energy_.end(), 0.0) + unresolved_;
}

ShellLayout::ShellLayout(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), k_max_(static_cast<int>(std::max(rows, cols) / 2)),
      shells_(rows * cols) {
  int largest = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double ky = signed_frequency(r, rows);
    for (std::size_t c = 0; c < cols; ++c) {
      const double kx = signed_frequency(c, cols);
      const int k = static_cast<int>(std::lround(std::sqrt(kx * kx + ky * ky)));
      shells_[r * cols + c] = k;
      largest = std::max(largest, k);
    }
  }
  counts_.assign(static_cast<std::size_t>(largest) + 1, 0);
  for (int k : shells_) ++counts_[static_cast<std::size_t>(k)];
}

int ShellLayout::signed_frequency(std::size_t index, std::size_t n) noexcept {
  const auto i = static_cast<long>(index);
  const auto len = static_cast<long>(n);
  return static_cast<int>(i <= (len - 1) / 2 ? i : i - len);
}

namespace {

void check_spectral_grid(const LatLonGrid& grid) {
  if (!grid.lat_uniform()) {
    throw Error(ErrorKind::InvalidGrid, "isotropic spectrum needs uniformly spaced latitudes");
  }
  if (static_cast<int>(std::min(grid.nlat(), grid.nlon()) / 2) < kMinResolvedWavenumber) {
    throw Error(ErrorKind::GridTooCoarse,
                fmt::format("{}x{} grid resolves fewer than {} shells", grid.nlat(), grid.nlon(),
                            kMinResolvedWavenumber));
  }
}

std::vector<double> weighted_anomaly(const LatLonGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw Error(ErrorKind::InvalidField, "value count mismatch");
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double s = std::sqrt(grid.cos_lat(i));
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      if (!std::isfinite(values[p])) throw Error(ErrorKind::InvalidField, "non-finite value");
      g[p] = s * values[p];
    }
  }
  const double m = mean(g);
  for (auto& x : g) x -= m;
  return g;
}

void require_same_support(const Spectrum& a, const Spectrum& b) {
  if (a.k_max() != b.k_max()) {
    throw Error(ErrorKind::ShellMismatch,
                fmt::format("spectra have {} and {} shells", a.k_max(), b.k_max()));
  }
}

double fidelity_from_ratios(std::span<const double> ratios) {
  if (ratios.empty()) throw Error(ErrorKind::InsufficientSpectrum, "no shell with positive energies");
  double sum = 0.0;
  for (double r : ratios) sum += std::abs(std::log10(r));
  const double value = 1.0 - 0.5 * sum / static_cast<double>(ratios.size());
  return std::clamp(value, 0.0, 1.0);
}

Spectrum bin_power(const ShellLayout& layout, std::span<const double> power) {
  if (power.size() != layout.rows() * layout.cols()) {
    throw Error(ErrorKind::ShellMismatch, "coefficient array does not match shell layout");
  }
  std::vector<double> energy(static_cast<std::size_t>(layout.k_max()), 0.0);
  double unresolved = 0.0;
  for (std::size_t r = 0; r < layout.rows(); ++r) {
    for (std::size_t c = 0; c < layout.cols(); ++c) {
      const int k = layout.shell(r, c);
      if (k == 0) continue;
      const double e = power[r * layout.cols() + c];
      if (k <= layout.k_max()) {
        energy[static_cast<std::size_t>(k - 1)] += e;
      } else {
        unresolved += e;
      }
    }
  }
  return Spectrum(std::move(energy), unresolved);
}

}  // namespace

std::vector<std::complex<double>> weighted_coefficients(const LatLonGrid& grid,
                                                        std::span<const double> values) {
  const auto g = weighted_anomaly(grid, values);
  std::vector<std::complex<double>> c(g.begin(), g.end());
  Fft2d fft(grid.nlat(), grid.nlon());
  fft.forward(c);
  const double inv_n = 1.0 / static_cast<double>(c.size());
  for (auto& x : c) x *= inv_n;
  return c;
}

double weighted_variance(const LatLonGrid& grid, std::span<const double> values) {
  const auto g = weighted_anomaly(grid, values);
  double ss = 0.0;
  for (double x : g) ss += x * x;
  return ss / static_cast<double>(g.size());
}

Spectrum bin_shells(const ShellLayout& layout, std::span<const std::complex<double>> coefficients) {
  std::vector<double> power(coefficients.size());
  std::transform(coefficients.begin(), coefficients.end(), power.begin(),
                 [](const std::complex<double>& c) { return std::norm(c); });
  return bin_power(layout, power);
}

Spectrum isotropic_spectrum(const LatLonGrid& grid, std::span<const double> values) {
  check_spectral_grid(grid);
  const auto coefficients = weighted_coefficients(grid, values);
  return bin_shells(ShellLayout(grid.nlat(), grid.nlon()), coefficients);
}

Spectrum isotropic_spectrum(const ScalarField& field) {
  return isotropic_spectrum(field.grid(), field.values());
}

Spectrum mean_spectrum(std::span<const Spectrum> spectra) {
  if (spectra.empty()) throw Error(ErrorKind::InsufficientSpectrum, "no spectra to average");
  std::vector<double> energy(static_cast<std::size_t>(spectra.front().k_max()), 0.0);
  double unresolved = 0.0;
  for (const auto& s : spectra) {
    require_same_support(s, spectra.front());
    for (std::size_t k = 0; k < energy.size(); ++k) energy[k] += s.energies()[k];
    unresolved += s.unresolved_energy();
  }
  const double n = static_cast<double>(spectra.size());
  for (auto& e : energy) e /= n;
  return Spectrum(std::move(energy), unresolved / n);
}

SpectralRatio spectral_ratio(const Spectrum& forecast, const Spectrum& verify) {
  require_same_support(forecast, verify);
  SpectralRatio out;
  for (int k = 1; k <= verify.k_max(); ++k) {
    const double ea = verify.energy(k);
    if (ea > 0.0) {
      out.wavenumbers.push_back(k);
      out.ratio.push_back(forecast.energy(k) / ea);
    } else {
      out.flagged.push_back(k);
    }
  }
  return out;
}

double sfi(const Spectrum& forecast, const Spectrum& verify) {
  require_same_support(forecast, verify);
  std::vector<double> ratios;
  const int k_hi = std::min(verify.k_max(), kSfiMaxWavenumber);
  for (int k = 1; k <= k_hi; ++k) {
    const double ef = forecast.energy(k);
    const double ea = verify.energy(k);
    if (ea > 0.0 && ef > 0.0) ratios.push_back(ef / ea);
  }
  return fidelity_from_ratios(ratios);
}

EffectiveResolution effective_resolution(const Spectrum& forecast, const Spectrum& verify) {
  require_same_support(forecast, verify);
  if (verify.k_max() == 0) throw Error(ErrorKind::InsufficientSpectrum, "empty spectrum");
  EffectiveResolution out;
  for (int k = verify.k_max(); k >= 1; --k) {
    const double ea = verify.energy(k);
    if (ea > 0.0 && forecast.energy(k) / ea >= kHalfPowerRatio) {
      out.wavenumber = k;
      break;
    }
  }
  out.normalized = std::min(1.0, out.wavenumber / kEffectiveResolutionScale);
  return out;
}

PowerLawFit fit_power_law(const Spectrum& spectrum, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi <= k_lo || k_hi > spectrum.k_max()) {
    throw Error(ErrorKind::InsufficientSpectrum,
                fmt::format("fit range [{}, {}] outside 1..{}", k_lo, k_hi, spectrum.k_max()));
  }
  std::vector<double> x, y;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double e = spectrum.energy(k);
    if (!(e > 0.0)) throw Error(ErrorKind::NonpositiveEnergy, fmt::format("zero energy at k={}", k));
    x.push_back(std::log(static_cast<double>(k)));
    y.push_back(std::log(e));
  }
  const auto line = fit_line(x, y);
  return PowerLawFit{line.slope, line.intercept, line.r2};
}

ConditionalVarianceSpectrum conditional_variance_spectrum(std::span<const ScalarField> ensemble) {
  if (ensemble.size() < 2) throw Error(ErrorKind::InsufficientEnsemble, "need at least two members");
  const auto& grid = ensemble.front().grid();
  const auto valid = ensemble.front().meta().valid_time();
  for (const auto& m : ensemble) {
    if (!same_grid(m.grid_ptr(), ensemble.front().grid_ptr())) {
      throw Error(ErrorKind::GridMismatch, "ensemble members on different grids");
    }
    if (m.meta().valid_time() != valid) {
      throw Error(ErrorKind::FieldMismatch, "ensemble members valid at different times");
    }
  }
  check_spectral_grid(grid);

  std::vector<std::vector<std::complex<double>>> coefficients;
  coefficients.reserve(ensemble.size());
  for (const auto& m : ensemble) coefficients.push_back(weighted_coefficients(grid, m.values()));

  const std::size_t n = grid.size();
  std::vector<std::complex<double>> centre(n);
  for (const auto& c : coefficients) {
    for (std::size_t p = 0; p < n; ++p) centre[p] += c[p];
  }
  const double members = static_cast<double>(ensemble.size());
  for (auto& c : centre) c /= members;

  std::vector<double> spread(n, 0.0);
  for (const auto& c : coefficients) {
    for (std::size_t p = 0; p < n; ++p) spread[p] += std::norm(c[p] - centre[p]);
  }
  for (auto& s : spread) s /= members - 1.0;

  return ConditionalVarianceSpectrum{bin_power(ShellLayout(grid.nlat(), grid.nlon()), spread),
                                     ensemble.front().meta().lead_hours};
}

LossFamily parse_loss_family(std::string_view name) {
  if (name == "mse") return LossFamily::mse;
  if (name == "crps") return LossFamily::crps;
  if (name == "score") return LossFamily::score;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown loss family '{}'", name));
}

std::string_view to_string(LossFamily loss) noexcept {
  switch (loss) {
    case LossFamily::mse: return "mse";
    case LossFamily::crps: return "crps";
    case LossFamily::score: return "score";
  }
  return "unknown";
}

double predicted_sfi(LossFamily loss, const ConditionalVarianceSpectrum& variance, const Spectrum& truth,
                     const Spectrum* sample_noise) {
  require_same_support(variance.variance, truth);
  if (sample_noise) require_same_support(*sample_noise, truth);
  std::vector<double> ratios;
  const int k_hi = std::min(truth.k_max(), kSfiMaxWavenumber);
  for (int k = 1; k <= k_hi; ++k) {
    const double e = truth.energy(k);
    if (!(e > 0.0)) continue;
    double r = 1.0;
    switch (loss) {
      case LossFamily::mse: {
        const double v = variance.variance.energy(k);
        if (v > e * (1.0 + 1e-12)) {
          throw Error(ErrorKind::InconsistentVariance,
                      fmt::format("conditional variance exceeds truth energy at k={}", k));
        }
        r = 1.0 - v / e;
        break;
      }
      case LossFamily::crps: r = 1.0; break;
      case LossFamily::score: r = 1.0 + (sample_noise ? sample_noise->energy(k) / e : 0.0); break;
    }
    if (r > 0.0) ratios.push_back(r);
  }
  return fidelity_from_ratios(ratios);
}

}  // namespace wxdiag
