#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "wxdiag/composite.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {
namespace {

struct TableRow {
  std::string model;
  MetricVector metrics;
  double hmas;
};

std::vector<TableRow> load_reference_table() {
  std::ifstream in(std::string(WXDIAG_FIXTURE_DIR) + "/hmas_reference_120h.csv");
  std::string line;
  std::getline(in, line);
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    TableRow r;
    std::getline(ss, r.model, ',');
    std::string cell;
    for (auto& m : r.metrics) {
      std::getline(ss, cell, ',');
      m = std::stod(cell);
    }
    std::getline(ss, cell, ',');
    r.hmas = std::stod(cell);
    rows.push_back(r);
  }
  return rows;
}

TEST(Hmas, ReproducesReferenceTable) {
  const auto rows = load_reference_table();
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) EXPECT_NEAR(hmas(r.metrics), r.hmas, 1e-3) << r.model;
}

TEST(Hmas, DefaultWeightsAndValidation) {
  const auto w = default_scheme().weights;
  EXPECT_EQ(w, (MetricVector{0.20, 0.15, 0.15, 0.15, 0.15, 0.20}));
  for (const auto& s : standard_schemes()) EXPECT_NO_THROW(validate(s)) << s.name;
  EXPECT_EQ(standard_schemes().size(), 5u);
  for (const auto& bad : {MetricVector{0.5, 0.5, 0.1, 0, 0, 0}, MetricVector{1.2, -0.2, 0, 0, 0, 0}}) {
    try {
      validate({"bad", bad});
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidWeights);
    }
  }
  EXPECT_DOUBLE_EQ(hmas(MetricVector{1, 1, 1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(hmas(MetricVector{0, 0, 0, 0, 0, 0}), 0.0);
  try {
    hmas(MetricVector{1.01, 1, 1, 1, 1, 1});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfRangeMetric);
  }
  EXPECT_THROW(hmas(MetricVector{std::nan(""), 1, 1, 1, 1, 1}), Error);
}

TEST(Hmas, IsMonotoneInEachMetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.9);
  for (int trial = 0; trial < 100; ++trial) {
    MetricVector m;
    for (auto& x : m) x = u(rng);
    for (std::size_t i = 0; i < kHmasMetrics; ++i) {
      auto up = m;
      up[i] += 0.1;
      EXPECT_GE(hmas(up), hmas(m));
    }
  }
}

std::vector<double> permutation_ranks(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<double>(i + 1);
  std::shuffle(r.begin(), r.end(), rng);
  return r;
}

TEST(KendallW, UntiedRanksMatchMeanSpearmanIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + trial % 5, n = 3 + trial % 7;
    std::vector<std::vector<double>> ranks;
    for (std::size_t r = 0; r < m; ++r) ranks.push_back(permutation_ranks(n, rng));
    double rho = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) rho += pearson(ranks[a], ranks[b]);
    }
    rho /= m * (m - 1) / 2.0;
    const double expected = ((m - 1) * rho + 1.0) / m;
    EXPECT_NEAR(kendall_w(ranks), expected, 1e-12);
  }
}

TEST(KendallW, TieCorrectionByHand) {
  // Three raters, four items, one tie pair in the second rater.
  const std::vector<std::vector<double>> ranks{{1, 2, 3, 4}, {1.5, 1.5, 3, 4}, {2, 1, 4, 3}};
  // Totals 4.5 4.5 10 11, mean 7.5: S = 9 + 9 + 6.25 + 12.25 = 36.5.
  // Denominator 9 * 60 - 3 * 6 = 522.
  EXPECT_NEAR(kendall_w(ranks), 12.0 * 36.5 / 522.0, 1e-12);
  EXPECT_NEAR(kendall_w(std::vector<std::vector<double>>{{1, 2, 3}, {1, 2, 3}}), 1.0, 1e-12);
  try {
    kendall_w(std::vector<std::vector<double>>{{2, 2, 2}, {2, 2, 2}});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateRanks);
  }
}

std::vector<std::size_t> brute_force_front(const std::vector<std::vector<double>>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      bool ge = true, gt = false;
      for (std::size_t d = 0; d < pts[i].size(); ++d) {
        ge = ge && pts[j][d] >= pts[i][d];
        gt = gt || pts[j][d] > pts[i][d];
      }
      dominated = ge && gt;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

TEST(Pareto, MatchesQuadraticFilter) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> pts(5 + trial);
    for (auto& p : pts) {
      p.resize(2 + trial % 4);
      for (auto& x : p) x = coarse(rng) / 4.0;  // coarse values force ties
    }
    const auto front = pareto_front(pts);
    EXPECT_EQ(front, brute_force_front(pts));
    for (std::size_t a : front) {
      for (std::size_t b : front) EXPECT_FALSE(dominates(pts[a], pts[b]));
    }
  }
  EXPECT_THROW(pareto_front(std::vector<std::vector<double>>{{1, 2}, {1}}), Error);
  EXPECT_TRUE(pareto_front(std::vector<std::vector<double>>{}).empty());
}

TEST(Sensitivity, RanksAndConcordance) {
  std::vector<HmasRecord> records;
  const MetricVector a{0.9, 0.9, 0.9, 0.9, 0.9, 0.9}, b{0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
      c{0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  records.push_back(make_hmas_record("b", 120, b));
  records.push_back(make_hmas_record("a", 120, a));
  records.push_back(make_hmas_record("c", 120, c));
  const auto schemes = standard_schemes();
  const auto t = weight_sensitivity(records, schemes);
  EXPECT_EQ(t.schemes.size(), schemes.size());
  EXPECT_EQ(t.models, (std::vector<std::string>{"b", "a", "c"}));
  for (const auto& r : t.ranks) EXPECT_EQ(r, (std::vector<double>{2, 1, 3}));
  EXPECT_DOUBLE_EQ(t.kendall_w, 1.0);
  EXPECT_NEAR(t.scores[0][1], 0.9, 1e-12);
  EXPECT_THROW(weight_sensitivity(std::span(records).first(2), schemes), Error);
}

TEST(MetricCorrelationTest, ConstantMetricIsUndefined) {
  std::vector<HmasRecord> records;
  for (int i = 0; i < 4; ++i) {
    const double x = 0.2 * i;
    records.push_back(make_hmas_record(std::to_string(i), 24, MetricVector{x, 1.0 - x, x, x * x, 0.5, x}));
  }
  const auto c = metric_correlation(records);
  EXPECT_TRUE(c.undefined[4]);
  EXPECT_TRUE(std::isnan(c.r[4][0]));
  EXPECT_NEAR(c.r[0][1], -1.0, 1e-12);
  EXPECT_NEAR(c.r[0][2], 1.0, 1e-12);
  EXPECT_EQ(c.r[0][0], 1.0);
  EXPECT_GT(c.mean_abs_offdiag, 0.9);
  EXPECT_THROW(metric_correlation(std::span(records).first(2)), Error);
}

TEST(Sfs, ArithmeticAndErrors) {
  const auto t = sfs(0.8, 0.6, 2.0, 10.0, 3.0);
  EXPECT_DOUBLE_EQ(t.information, 0.4);
  EXPECT_NEAR(t.sfs, (0.8 + 0.6 + 0.4) / 3.0, 1e-12);
  EXPECT_EQ(sfs(0.8, 0.6, 5.0, 10.0, 3.0).information, 0.0);
  try {
    sfs(0.8, 0.6, 2.0, 0.0, 3.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInformationBudget);
  }
  try {
    sfs(0.8, 0.6, 2.0, 10.0, 3.0, {0.5, 0.5, 0.5});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidWeights);
  }
}

TEST(Sfs, DataCoverageAveragesVariables) {
  const std::vector<CoverageInput> vars{{0.0, 1.0, {0.5, 1.0, 1.5, -0.1}}, {0.0, 10.0, {5.0}}, {0.0, 1.0, {}}};
  EXPECT_DOUBLE_EQ(data_coverage(vars), (0.5 + 1.0) / 2.0);
  EXPECT_THROW(data_coverage(std::span(vars).subspan(2)), Error);
  const Spectrum truth(std::vector<double>(10, 2.0));
  const ConditionalVarianceSpectrum var{Spectrum(std::vector<double>(10, 0.0)), 10};
  const auto t = sfs(LossFamily::mse, var, truth, vars, 0.0, 5.0, 1.0);
  EXPECT_DOUBLE_EQ(t.sfi_predicted, 1.0);
  EXPECT_NEAR(t.sfs, (1.0 + 0.75 + 1.0) / 3.0, 1e-12);
}

}  // namespace
}  // namespace wxdiag
