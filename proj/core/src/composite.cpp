#include "wxdiag/composite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

}  // namespace

void validate(const WeightScheme& scheme) {
  double sum = 0.0;
  for (double w : scheme.weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidWeights, fmt::format("scheme {} has a negative weight", scheme.name));
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorKind::InvalidWeights, fmt::format("scheme {} weights sum to {}", scheme.name, sum));
  }
}

WeightScheme default_scheme() { return {"default", {0.20, 0.15, 0.15, 0.15, 0.15, 0.20}}; }

std::vector<WeightScheme> standard_schemes() {
  const double e = 1.0 / 6.0;
  return {
      default_scheme(),
      {"equal", {e, e, e, e, e, 1.0 - 5.0 * e}},
      {"accuracy", {0.15, 0.20, 0.25, 0.10, 0.10, 0.20}},
      {"extremes", {0.15, 0.10, 0.10, 0.40, 0.15, 0.10}},
      {"stability", {0.10, 0.10, 0.10, 0.10, 0.20, 0.40}},
  };
}

double hmas(const MetricVector& metrics, const WeightScheme& scheme) {
  validate(scheme);
  double total = 0.0;
  for (std::size_t i = 0; i < kHmasMetrics; ++i) {
    const double m = metrics[i];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw Error(ErrorKind::OutOfRangeMetric, fmt::format("{} = {} is outside [0, 1]", kHmasMetricNames[i], m));
    }
    total += scheme.weights[i] * m;
  }
  return total;
}

HmasRecord make_hmas_record(std::string model, int lead_hours, const MetricVector& metrics,
                            const WeightScheme& scheme) {
  return {std::move(model), lead_hours, metrics, hmas(metrics, scheme), scheme.name};
}

double kendall_w(std::span<const std::vector<double>> ranks) {
  const std::size_t m = ranks.size();
  if (m == 0) throw Error(ErrorKind::DegenerateRanks, "no rank vectors");
  const std::size_t n = ranks.front().size();
  for (const auto& r : ranks) {
    if (r.size() != n) throw Error(ErrorKind::DegenerateRanks, "rank vectors differ in length");
  }
  std::vector<double> totals(n, 0.0);
  for (const auto& r : ranks) {
    for (std::size_t i = 0; i < n; ++i) totals[i] += r[i];
  }
  const double mean_total = static_cast<double>(m) * (static_cast<double>(n) + 1.0) / 2.0;
  double s = 0.0;
  for (double t : totals) s += (t - mean_total) * (t - mean_total);

  double ties = 0.0;
  for (const auto& r : ranks) {
    std::vector<double> sorted(r);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      ties += t * t * t - t;
      i = j;
    }
  }
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double denom = md * md * (nd * nd * nd - nd) - md * ties;
  if (!(denom > 0.0)) throw Error(ErrorKind::DegenerateRanks, "all items tied under every rater");
  return 12.0 * s / denom;
}

SensitivityTable weight_sensitivity(std::span<const HmasRecord> records, std::span<const WeightScheme> schemes) {
  if (schemes.size() < 2) throw Error(ErrorKind::InsufficientSamples, "weight sensitivity needs two schemes");
  if (records.size() < 3) throw Error(ErrorKind::InsufficientSamples, "weight sensitivity needs three models");
  SensitivityTable t;
  for (const auto& r : records) t.models.push_back(r.model);
  for (const auto& s : schemes) {
    t.schemes.push_back(s.name);
    std::vector<double> scores;
    for (const auto& r : records) scores.push_back(hmas(r.metrics, s));
    t.ranks.push_back(midranks(scores, /*descending=*/true));
    t.scores.push_back(std::move(scores));
  }
  t.kendall_w = kendall_w(t.ranks);
  return t;
}

MetricCorrelation metric_correlation(std::span<const HmasRecord> records) {
  if (records.size() < 3) throw Error(ErrorKind::InsufficientSamples, "metric correlation needs three models");
  std::array<std::vector<double>, kHmasMetrics> cols;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < kHmasMetrics; ++i) cols[i].push_back(r.metrics[i]);
  }
  MetricCorrelation out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < kHmasMetrics; ++i) {
    const auto [lo, hi] = std::minmax_element(cols[i].begin(), cols[i].end());
    out.undefined[i] = *lo == *hi;
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < kHmasMetrics; ++i) {
    for (std::size_t j = 0; j < kHmasMetrics; ++j) {
      if (out.undefined[i] || out.undefined[j]) {
        out.r[i][j] = nan;
        continue;
      }
      out.r[i][j] = i == j ? 1.0 : pearson(cols[i], cols[j]);
      if (i < j) {
        sum += std::abs(out.r[i][j]);
        ++pairs;
      }
    }
  }
  out.mean_abs_offdiag = pairs ? sum / static_cast<double>(pairs) : nan;
  return out;
}

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

std::vector<std::size_t> pareto_front(std::span<const std::vector<double>> points) {
  if (points.empty()) return {};
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorKind::InvalidSeries, "points differ in dimension");
  }
  // A dominator sorts lexicographically before what it dominates, so each
  // candidate only needs checking against the front built so far.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(points[b].begin(), points[b].end(), points[a].begin(), points[a].end());
  });
  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const bool dominated = std::any_of(front.begin(), front.end(),
                                       [&](std::size_t f) { return dominates(points[f], points[idx]); });
    if (!dominated) front.push_back(idx);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double data_coverage(std::span<const CoverageInput> variables) {
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& v : variables) {
    if (v.eval.empty()) continue;
    const auto inside = std::count_if(v.eval.begin(), v.eval.end(),
                                      [&](double x) { return x >= v.train_min && x <= v.train_max; });
    sum += static_cast<double>(inside) / static_cast<double>(v.eval.size());
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::InsufficientSamples, "no evaluation samples for data coverage");
  return sum / static_cast<double>(used);
}

SfsTerms sfs(double sfi_predicted, double coverage, double h_ks_per_day, double i0_bits, double tau_days,
             const SfsWeights& w) {
  if (!(i0_bits > 0.0)) throw Error(ErrorKind::InvalidInformationBudget, fmt::format("i0 = {} must be positive", i0_bits));
  if (!(w.w1 >= 0.0 && w.w2 >= 0.0 && w.w3 >= 0.0) || std::abs(w.w1 + w.w2 + w.w3 - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorKind::InvalidWeights, "SFS weights must be nonnegative and sum to 1");
  }
  SfsTerms t;
  t.sfi_predicted = sfi_predicted;
  t.coverage = coverage;
  t.information = std::max(0.0, 1.0 - h_ks_per_day * tau_days / i0_bits);
  t.sfs = w.w1 * t.sfi_predicted + w.w2 * t.coverage + w.w3 * t.information;
  return t;
}

SfsTerms sfs(LossFamily loss, const ConditionalVarianceSpectrum& variance, const Spectrum& truth,
             std::span<const CoverageInput> coverage, double h_ks_per_day, double i0_bits, double tau_days,
             const SfsWeights& weights) {
  return sfs(predicted_sfi(loss, variance, truth), data_coverage(coverage), h_ks_per_day, i0_bits, tau_days,
             weights);
}

}  // namespace wxdiag
