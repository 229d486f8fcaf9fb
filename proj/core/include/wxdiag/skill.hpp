#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "wxdiag/climatology.hpp"
#include "wxdiag/grid.hpp"

namespace wxdiag {

inline constexpr double kCi90Z = 1.645;

/// Area-weighted mean squared difference over the mask (global when null).
/// Throws GridMismatch / FieldMismatch when the fields are not comparable.
double weighted_mse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask = nullptr);
double rmse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask = nullptr);

/// Plain (unweighted) mean squared difference over the mask.
double unweighted_mse(const ScalarField& forecast, const ScalarField& verify, const Mask* mask = nullptr);

/// Plain mean squared difference along one latitude row.
double zonal_mse(const ScalarField& forecast, const ScalarField& verify, std::size_t row);

struct BandError {
  Band band;
  double area_fraction = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
};

/// Tropics, extratropics and polar errors; area_fraction-weighted band MSEs
/// sum to the global MSE. Bands with zero area report NaN errors.
std::array<BandError, 3> regional_errors(const ScalarField& forecast, const ScalarField& verify);

/// Anomaly correlation against climatology, uncentred by default.
/// Throws DegenerateAnomaly when either anomaly has zero weighted energy.
double acc(const ScalarField& forecast, const ScalarField& verify, const Climatology& clim,
           bool centered = false);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

/// 90% interval from the inter-sample standard error: 1.645 * s / sqrt(n).
/// Throws InsufficientSamples for n < 2.
ConfidenceInterval confidence_interval(std::span<const double> samples);

struct MetricSeries {
  std::string model;
  std::string variable;
  std::string metric;
  std::vector<int> leads;
  std::vector<double> mean;
  std::vector<double> ci_half_width;
  std::vector<std::size_t> n;
};

struct Scorecard {
  std::vector<std::string> models;
  std::vector<int> leads;
  /// ranks[m][l]: 1 is the lowest value at that lead; ties share the lower
  /// rank (competition ranking); NaN means rank after every finite value.
  std::vector<std::vector<int>> ranks;
};

/// Throws FieldMismatch when the series do not share a lead grid.
Scorecard scorecard(std::span<const MetricSeries> series);

/// Competition ranks of `values`, smallest first.
std::vector<int> competition_ranks(std::span<const double> values);

}  // namespace wxdiag
