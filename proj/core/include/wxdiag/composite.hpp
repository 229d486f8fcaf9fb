#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxdiag/spectral.hpp"

namespace wxdiag {

inline constexpr std::size_t kHmasMetrics = 6;

/// SFI, l_eff, tau_d, EES, PCS, ASI; every entry in [0, 1], larger is better.
using MetricVector = std::array<double, kHmasMetrics>;

inline constexpr std::array<std::string_view, kHmasMetrics> kHmasMetricNames{"sfi", "l_eff", "tau_d",
                                                                              "ees", "pcs", "asi"};

struct WeightScheme {
  std::string name;
  MetricVector weights{};
};

/// Throws InvalidWeights unless weights are nonnegative and sum to 1 (1e-12).
void validate(const WeightScheme& scheme);

WeightScheme default_scheme();
/// default, equal, accuracy, extremes, stability.
std::vector<WeightScheme> standard_schemes();

/// Weighted sum. Throws OutOfRangeMetric for a metric outside [0, 1].
double hmas(const MetricVector& metrics, const WeightScheme& scheme = default_scheme());

struct HmasRecord {
  std::string model;
  int lead_hours = 0;
  MetricVector metrics{};
  double hmas = 0.0;
  std::string scheme;
};

HmasRecord make_hmas_record(std::string model, int lead_hours, const MetricVector& metrics,
                            const WeightScheme& scheme = default_scheme());

/// Kendall's coefficient of concordance for ranks[rater][item], with the
/// midrank tie correction. Throws DegenerateRanks when every rater ties
/// every item.
double kendall_w(std::span<const std::vector<double>> ranks);

struct SensitivityTable {
  std::vector<std::string> schemes;
  std::vector<std::string> models;
  std::vector<std::vector<double>> scores;  ///< [scheme][model]
  std::vector<std::vector<double>> ranks;   ///< midranks, 1 = highest HMAS
  double kendall_w = 1.0;
};

/// Needs at least two schemes and three models (InsufficientSamples).
SensitivityTable weight_sensitivity(std::span<const HmasRecord> records, std::span<const WeightScheme> schemes);

struct MetricCorrelation {
  /// NaN in rows and columns of zero-variance metrics.
  std::array<std::array<double, kHmasMetrics>, kHmasMetrics> r{};
  std::array<bool, kHmasMetrics> undefined{};
  /// Mean |r| over defined off-diagonal pairs (NaN when none).
  double mean_abs_offdiag = 0.0;
};

/// Pearson correlation across models of each metric pair. Needs three records.
MetricCorrelation metric_correlation(std::span<const HmasRecord> records);

/// Indices of non-dominated vectors (larger is better), in input order.
/// Throws InvalidSeries when the vectors differ in length.
std::vector<std::size_t> pareto_front(std::span<const std::vector<double>> points);

/// True when a is at least b everywhere and strictly better somewhere.
bool dominates(std::span<const double> a, std::span<const double> b);

struct CoverageInput {
  double train_min = 0.0;
  double train_max = 0.0;
  std::vector<double> eval;
};

/// Mean over variables of the fraction of evaluation samples inside the
/// training range. Variables without samples are skipped.
double data_coverage(std::span<const CoverageInput> variables);

struct SfsWeights {
  double w1 = 1.0 / 3.0;
  double w2 = 1.0 / 3.0;
  double w3 = 1.0 / 3.0;
};

struct SfsTerms {
  double sfi_predicted = 0.0;
  double coverage = 0.0;
  double information = 0.0;  ///< max(0, 1 - h_ks tau / i0)
  double sfs = 0.0;
};

/// Throws InvalidInformationBudget for i0 <= 0 and InvalidWeights when the
/// weights are negative or do not sum to 1.
SfsTerms sfs(double sfi_predicted, double coverage, double h_ks_per_day, double i0_bits, double tau_days,
             const SfsWeights& weights = {});

SfsTerms sfs(LossFamily loss, const ConditionalVarianceSpectrum& variance, const Spectrum& truth,
             std::span<const CoverageInput> coverage, double h_ks_per_day, double i0_bits, double tau_days,
             const SfsWeights& weights = {});

}  // namespace wxdiag
