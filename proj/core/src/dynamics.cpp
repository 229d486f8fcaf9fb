#include "wxdiag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

namespace {

// ln(series) against lead days, restricted to [lo, hi] days.
LinearFit log_fit(std::span<const int> lead_hours, std::span<const double> series, double lo, double hi,
                  const char* what) {
  if (lead_hours.size() != series.size()) throw Error(ErrorKind::InvalidSeries, "lead/value length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double day = lead_hours[i] / 24.0;
    if (day < lo - 1e-9 || day > hi + 1e-9) continue;
    if (!(series[i] > 0.0) || !std::isfinite(series[i])) {
      throw Error(ErrorKind::InvalidSeries, fmt::format("nonpositive {} at lead {}h", what, lead_hours[i]));
    }
    x.push_back(day);
    y.push_back(std::log(series[i]));
  }
  if (x.size() < 3) {
    throw Error(ErrorKind::InvalidSeries, fmt::format("{} leads in [{}, {}] days, need 3", x.size(), lo, hi));
  }
  return fit_line(x, y);
}

}  // namespace

GrowthFit fit_lyapunov(std::span<const int> lead_hours, std::span<const double> rmse, double day_lo,
                       double day_hi) {
  const auto fit = log_fit(lead_hours, rmse, day_lo, day_hi, "RMSE");
  GrowthFit out;
  out.lambda_eff = fit.slope;
  out.day_lo = day_lo;
  out.day_hi = day_hi;
  out.r2 = fit.r2;
  if (fit.slope > 0.0) {
    out.tau_d_hours = std::numbers::ln2 / fit.slope * 24.0;
    out.tau_d_norm = std::min(1.0, out.tau_d_hours / kDoublingNormHours);
  } else {
    out.tau_d_hours = std::numeric_limits<double>::infinity();
    out.tau_d_norm = 1.0;
  }
  return out;
}

double kinetic_energy(const ScalarField& u, const ScalarField& v) {
  if (!same_grid(u.grid_ptr(), v.grid_ptr())) throw Error(ErrorKind::GridMismatch, "u and v on different grids");
  std::vector<double> ke(u.values().size());
  for (std::size_t p = 0; p < ke.size(); ++p) {
    ke[p] = 0.5 * (u.values()[p] * u.values()[p] + v.values()[p] * v.values()[p]);
  }
  return area_weighted_mean(u.grid(), ke);
}

std::vector<double> ke_ratio_series(std::span<const ScalarField> u, std::span<const ScalarField> v) {
  if (u.size() != v.size() || u.empty()) throw Error(ErrorKind::MissingComponent, "unpaired u/v series");
  std::vector<double> ke;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].meta().lead_hours != v[i].meta().lead_hours) {
      throw Error(ErrorKind::MissingComponent, fmt::format("u at {}h paired with v at {}h", u[i].meta().lead_hours,
                                                           v[i].meta().lead_hours));
    }
    ke.push_back(kinetic_energy(u[i], v[i]));
  }
  if (!(ke.front() > 0.0)) throw Error(ErrorKind::InvalidSeries, "zero kinetic energy at the first lead");
  const double ke0 = ke.front();
  for (auto& x : ke) x /= ke0;
  return ke;
}

double asi_from_gamma(double gamma_per_day, double window_days) noexcept {
  return std::clamp(1.0 - std::abs(gamma_per_day) * window_days / std::numbers::ln2, 0.0, 1.0);
}

KeDrift asi(std::span<const int> lead_hours, std::span<const double> ke_ratio, double window_days) {
  const auto fit = log_fit(lead_hours, ke_ratio, 0.0, window_days, "KE ratio");
  return KeDrift{fit.slope, window_days, asi_from_gamma(fit.slope, window_days)};
}

}  // namespace wxdiag
