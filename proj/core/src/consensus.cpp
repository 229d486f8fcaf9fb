#include "wxdiag/consensus.hpp"

#include <cmath>

#include "wxdiag/error.hpp"
#include "wxdiag/spectral.hpp"

namespace wxdiag {

namespace {

void require_ensemble(std::span<const ScalarField> errors) {
  if (errors.size() < 2) throw Error(ErrorKind::InsufficientEnsemble, "need at least two error fields");
  for (const auto& e : errors) {
    if (!same_grid(errors.front().grid_ptr(), e.grid_ptr())) {
      throw Error(ErrorKind::GridMismatch, "error fields on different grids");
    }
  }
}

}  // namespace

ScalarField error_field(const ScalarField& forecast, const ScalarField& verify) {
  if (!same_grid(forecast.grid_ptr(), verify.grid_ptr())) {
    throw Error(ErrorKind::GridMismatch, "forecast and verification on different grids");
  }
  std::vector<double> e(forecast.values().size());
  for (std::size_t p = 0; p < e.size(); ++p) e[p] = forecast.values()[p] - verify.values()[p];
  return forecast.with_values(std::move(e));
}

double ecr(std::span<const ScalarField> errors) {
  require_ensemble(errors);
  const auto& grid = errors.front().grid();
  const std::size_t n = grid.size();
  const double m = static_cast<double>(errors.size());
  std::vector<double> ebar(n, 0.0);
  for (const auto& e : errors) {
    for (std::size_t p = 0; p < n; ++p) ebar[p] += e.values()[p];
  }
  for (auto& x : ebar) x /= m;

  std::vector<double> shared(n), resid(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) shared[p] = ebar[p] * ebar[p];
  for (const auto& e : errors) {
    for (std::size_t p = 0; p < n; ++p) {
      const double r = e.values()[p] - ebar[p];
      resid[p] += r * r;
    }
  }
  for (auto& x : resid) x /= m;

  const double s = area_weighted_mean(grid, shared);
  const double r = area_weighted_mean(grid, resid);
  if (!(s + r > 0.0)) throw Error(ErrorKind::DegenerateErrors, "all error fields are zero");
  return s / (s + r);
}

double weighted_correlation(const LatLonGrid& grid, std::span<const double> a, std::span<const double> b) {
  const double ma = area_weighted_mean(grid, a);
  const double mb = area_weighted_mean(grid, b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double w = grid.row_weight(i);
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      const double da = a[p] - ma;
      const double db = b[p] - mb;
      sab += w * da * db;
      saa += w * da * da;
      sbb += w * db * db;
    }
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw Error(ErrorKind::DegenerateField, "zero-variance error field");
  return sab / std::sqrt(saa * sbb);
}

double pairwise_error_correlation(std::span<const ScalarField> errors) {
  require_ensemble(errors);
  const auto& grid = errors.front().grid();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    for (std::size_t j = i + 1; j < errors.size(); ++j) {
      sum += weighted_correlation(grid, errors[i].values(), errors[j].values());
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::string_view to_string(PairGroup group) noexcept {
  switch (group) {
    case PairGroup::all: return "all";
    case PairGroup::within_family: return "within_family";
    case PairGroup::cross_family: return "cross_family";
  }
  return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> select_pairs(std::span<const std::string> families,
                                                              PairGroup group) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < families.size(); ++i) {
    for (std::size_t j = i + 1; j < families.size(); ++j) {
      const bool same = families[i] == families[j];
      if (group == PairGroup::all || (group == PairGroup::within_family) == same) out.emplace_back(i, j);
    }
  }
  return out;
}

MedCurve med(std::span<const ScalarField> errors, std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  require_ensemble(errors);
  MedCurve out;
  out.pairs = pairs.size();
  if (pairs.empty()) return out;

  std::vector<Spectrum> spectra;
  spectra.reserve(errors.size());
  for (const auto& e : errors) spectra.push_back(isotropic_spectrum(e));

  const int k_max = spectra.front().k_max();
  for (int k = 1; k <= k_max; ++k) {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& [i, j] : pairs) {
      const double e1 = spectra.at(i).energy(k);
      const double e2 = spectra.at(j).energy(k);
      if (!(e1 + e2 > 0.0)) continue;
      sum += std::abs(e1 - e2) / (e1 + e2);
      ++used;
    }
    if (used == 0) {
      out.flagged.push_back(k);
      continue;
    }
    out.wavenumbers.push_back(k);
    out.med.push_back(sum / static_cast<double>(used));
  }
  return out;
}

}  // namespace wxdiag
