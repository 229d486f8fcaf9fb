#include "wxdiag/extremes.hpp"

#include <algorithm>
#include <cmath>

#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

namespace {

double sign_of(Tail tail) { return tail == Tail::warm ? 1.0 : -1.0; }

void require_clim_grid(const ScalarField& f, const Climatology& clim) {
  if (!same_grid(f.grid_ptr(), clim.grid_ptr())) throw Error(ErrorKind::GridMismatch, "climatology on a different grid");
}

}  // namespace

std::string_view to_string(Tail tail) noexcept { return tail == Tail::warm ? "warm" : "cold"; }

Exceedance exceedance_mask(const ScalarField& verify, const Climatology& clim, double threshold_sigmas, Tail tail) {
  require_clim_grid(verify, clim);
  const auto& slot = clim.at(verify.meta().valid_time());
  const double s = sign_of(tail);
  const std::size_t n = verify.values().size();
  Exceedance out{Mask(n, 0), std::vector<double>(n, 0.0), 0};
  for (std::size_t p = 0; p < n; ++p) {
    if (!(slot.sigma[p] > 0.0)) continue;
    const double d = s * (verify.values()[p] - slot.mu[p]) / slot.sigma[p];
    if (d > threshold_sigmas) {
      out.mask[p] = 1;
      out.delta[p] = d;
      ++out.count;
    }
  }
  return out;
}

double ees(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim, double threshold_sigmas,
           Tail tail) {
  if (!same_grid(forecast.grid_ptr(), verify.grid_ptr())) throw Error(ErrorKind::GridMismatch, "fields on different grids");
  const auto ex = exceedance_mask(verify, clim, threshold_sigmas, tail);
  if (ex.count == 0) throw Error(ErrorKind::NoExtremes, "no grid point exceeds the climatological threshold");
  std::vector<double> sq(forecast.values().size());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const double e = forecast.values()[p] - verify.values()[p];
    sq[p] = e * e;
  }
  const auto& grid = forecast.grid();
  const double uncond = std::sqrt(area_weighted_mean(grid, sq));
  if (!(uncond > 0.0)) throw Error(ErrorKind::DegenerateErrors, "zero global RMSE");
  // Pole-only masks carry no area; fall back to a plain mean there.
  const double cond = mask_weight(grid, ex.mask) > 0.0 ? std::sqrt(area_weighted_mean(grid, sq, &ex.mask)) : [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < sq.size(); ++p) s += ex.mask[p] ? sq[p] : 0.0;
    return std::sqrt(s / static_cast<double>(ex.count));
  }();
  return std::clamp(1.0 - cond / (3.0 * uncond), 0.0, 1.0);
}

TailAccumulator::TailAccumulator(TailOptions options) : options_(options) {
  if (!(options_.bin_width > 0.0) || !(options_.bin_hi > options_.bin_lo)) {
    throw Error(ErrorKind::ConfigError, "invalid tail binning");
  }
  const auto bins = static_cast<std::size_t>(std::llround((options_.bin_hi - options_.bin_lo) / options_.bin_width));
  sum_bias_.assign(bins, 0.0);
  sum_delta_.assign(bins, 0.0);
  count_.assign(bins, 0);
}

void TailAccumulator::add_sample(double delta, double bias) {
  if (delta < options_.bin_lo || delta >= options_.bin_hi) return;
  const auto b = static_cast<std::size_t>((delta - options_.bin_lo) / options_.bin_width);
  if (b >= count_.size()) return;
  sum_bias_[b] += bias;
  sum_delta_[b] += delta;
  ++count_[b];
  ++samples_;
}

std::size_t TailAccumulator::add(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim) {
  if (!same_grid(forecast.grid_ptr(), verify.grid_ptr())) throw Error(ErrorKind::GridMismatch, "fields on different grids");
  const auto ex = exceedance_mask(verify, clim, options_.threshold_sigmas, options_.tail);
  const double s = sign_of(options_.tail);
  const std::size_t before = samples_;
  for (std::size_t p = 0; p < ex.mask.size(); ++p) {
    if (!ex.mask[p]) continue;
    add_sample(ex.delta[p], s * (forecast.values()[p] - verify.values()[p]));
  }
  return samples_ - before;
}

TailCurve TailAccumulator::curve() const {
  if (samples_ == 0) throw Error(ErrorKind::NoExtremes, "no tail samples");
  TailCurve c;
  std::vector<double> x, y, w;
  for (std::size_t b = 0; b < count_.size(); ++b) {
    const double lo = options_.bin_lo + static_cast<double>(b) * options_.bin_width;
    c.bin_center.push_back(lo + 0.5 * options_.bin_width);
    c.count.push_back(count_[b]);
    if (count_[b] == 0) {
      c.mean_bias.push_back(0.0);
      c.mean_delta.push_back(c.bin_center.back());
      continue;
    }
    const double n = static_cast<double>(count_[b]);
    c.mean_bias.push_back(sum_bias_[b] / n);
    c.mean_delta.push_back(sum_delta_[b] / n);
    const double hi = lo + options_.bin_width;
    if (lo >= options_.fit_lo - 1e-12 && hi <= options_.fit_hi + 1e-12) {
      x.push_back(c.mean_delta.back());
      y.push_back(c.mean_bias.back());
      w.push_back(n);
    }
  }
  if (x.size() < 2) throw Error(ErrorKind::InsufficientTail, "fewer than two populated tail bins");
  const auto fit = fit_line(x, y, w);
  c.alpha = -fit.slope;
  c.intercept = fit.intercept;
  c.r2 = fit.r2;
  return c;
}

TailCurve tail_curve(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim,
                     const TailOptions& options) {
  TailAccumulator acc(options);
  acc.add(forecast, verify, clim);
  return acc.curve();
}

AlphaEvolution alpha_evolution(std::span<const int> lead_hours, std::span<const std::optional<TailCurve>> curves) {
  if (lead_hours.size() != curves.size()) throw Error(ErrorKind::InvalidSeries, "lead/curve length mismatch");
  AlphaEvolution out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (curves[i]) {
      out.points.push_back({lead_hours[i], curves[i]->alpha, curves[i]->r2});
    } else {
      out.flagged.push_back(lead_hours[i]);
    }
  }
  return out;
}

}  // namespace wxdiag
