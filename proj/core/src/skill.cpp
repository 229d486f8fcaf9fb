#include "wxdiag/skill.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

namespace {

void require_comparable(const ScalarField& a, const ScalarField& b) {
  if (!same_grid(a.grid_ptr(), b.grid_ptr())) throw Error(ErrorKind::GridMismatch, "fields on different grids");
  const auto& ma = a.meta();
  const auto& mb = b.meta();
  if (!ma.variable.empty() && !mb.variable.empty() && ma.variable != mb.variable) {
    throw Error(ErrorKind::FieldMismatch, fmt::format("comparing {} with {}", ma.variable, mb.variable));
  }
  if (ma.valid_time() != mb.valid_time() && ma.init_time != TimePoint{} && mb.init_time != TimePoint{}) {
    throw Error(ErrorKind::FieldMismatch, "fields valid at different times");
  }
}

std::vector<double> squared_difference(const ScalarField& f, const ScalarField& v) {
  std::vector<double> d(f.values().size());
  for (std::size_t p = 0; p < d.size(); ++p) {
    const double e = f.values()[p] - v.values()[p];
    d[p] = e * e;
  }
  return d;
}

}  // namespace

double weighted_mse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask) {
  require_comparable(forecast, verify);
  return area_weighted_mean(forecast.grid(), squared_difference(forecast, verify), mask);
}

double rmse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask) {
  return std::sqrt(weighted_mse(forecast, verify, mask));
}

double unweighted_mse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask) {
  require_comparable(forecast, verify);
  const auto d = squared_difference(forecast, verify);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (mask && !(*mask)[p]) continue;
    sum += d[p];
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::InvalidField, "empty mask");
  return sum / static_cast<double>(n);
}

double zonal_mse(const ScalarField& forecast, const ScalarField& verify, std::size_t row) {
  require_comparable(forecast, verify);
  const auto& grid = forecast.grid();
  if (row >= grid.nlat()) throw Error(ErrorKind::InvalidField, fmt::format("row {} outside the grid", row));
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.nlon(); ++j) {
    const double e = forecast.at(row, j) - verify.at(row, j);
    sum += e * e;
  }
  return sum / static_cast<double>(grid.nlon());
}

std::array<BandError, 3> regional_errors(const ScalarField& forecast, const ScalarField& verify) {
  require_comparable(forecast, verify);
  const auto& grid = forecast.grid();
  const auto d = squared_difference(forecast, verify);
  const double total = static_cast<double>(grid.size());
  std::array<BandError, 3> out{};
  const std::array<Band, 3> bands{Band::tropics, Band::extratropics, Band::polar};
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto mask = band_mask(grid, bands[b]);
    out[b].band = bands[b];
    out[b].area_fraction = mask_weight(grid, mask) / total;
    if (out[b].area_fraction > 0.0) {
      out[b].mse = area_weighted_mean(grid, d, &mask);
      out[b].rmse = std::sqrt(out[b].mse);
    } else {
      out[b].mse = out[b].rmse = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double acc(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim, bool centered) {
  require_comparable(forecast, verify);
  if (!same_grid(forecast.grid_ptr(), clim.grid_ptr()) && !(forecast.grid() == clim.grid())) {
    throw Error(ErrorKind::GridMismatch, "climatology on a different grid");
  }
  const auto& slot = clim.at(verify.meta().valid_time());
  const auto& grid = forecast.grid();
  const std::size_t n = grid.size();
  std::vector<double> fa(n), va(n);
  for (std::size_t p = 0; p < n; ++p) {
    fa[p] = forecast.values()[p] - slot.mu[p];
    va[p] = verify.values()[p] - slot.mu[p];
  }
  if (centered) {
    const double mf = area_weighted_mean(grid, fa);
    const double mv = area_weighted_mean(grid, va);
    for (std::size_t p = 0; p < n; ++p) {
      fa[p] -= mf;
      va[p] -= mv;
    }
  }
  double sfv = 0.0, sff = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double w = grid.row_weight(i);
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      sfv += w * fa[p] * va[p];
      sff += w * fa[p] * fa[p];
      svv += w * va[p] * va[p];
    }
  }
  if (!(sff > 0.0) || !(svv > 0.0)) throw Error(ErrorKind::DegenerateAnomaly, "zero anomaly energy");
  return sfv / std::sqrt(sff * svv);
}

ConfidenceInterval confidence_interval(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::InsufficientSamples, "confidence interval needs n >= 2");
  const double n = static_cast<double>(samples.size());
  return ConfidenceInterval{mean(samples), kCi90Z * sample_sd(samples) / std::sqrt(n), samples.size()};
}

std::vector<int> competition_ranks(std::span<const double> values) {
  std::vector<int> ranks(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int better = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const bool nan_i = std::isnan(values[i]);
      const bool nan_j = std::isnan(values[j]);
      if (nan_i) {
        if (!nan_j) ++better;
      } else if (!nan_j && values[j] < values[i]) {
        ++better;
      }
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

Scorecard scorecard(std::span<const MetricSeries> series) {
  Scorecard card;
  if (series.empty()) return card;
  card.leads = series.front().leads;
  for (const auto& s : series) {
    if (s.leads != card.leads || s.mean.size() != s.leads.size()) {
      throw Error(ErrorKind::FieldMismatch, "scorecard series must share a lead grid");
    }
    card.models.push_back(s.model);
  }
  card.ranks.assign(series.size(), std::vector<int>(card.leads.size(), 0));
  for (std::size_t l = 0; l < card.leads.size(); ++l) {
    std::vector<double> values;
    for (const auto& s : series) values.push_back(s.mean[l]);
    const auto r = competition_ranks(values);
    for (std::size_t m = 0; m < series.size(); ++m) card.ranks[m][l] = r[m];
  }
  return card;
}

}  // namespace wxdiag
