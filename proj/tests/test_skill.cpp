#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/skill.hpp"
#include "wxdiag/synth.hpp"

namespace wxdiag {
namespace {

using testing::make_grid;
using testing::random_field;

double direct_weighted_mse(const ScalarField& f, const ScalarField& v) {
  const auto& g = f.grid();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.nlat(); ++i) {
    const double w = std::cos(g.lat_rad(i));
    for (std::size_t j = 0; j < g.nlon(); ++j) {
      const double d = f.at(i, j) - v.at(i, j);
      num += w * d * d;
      den += w;
    }
  }
  return num / den;
}

TEST(Rmse, MatchesDirectWeightedSum) {
  const auto g = make_grid(19, 36);
  const auto f = random_field(g, 1, 3.0);
  const auto v = random_field(g, 2, 3.0);
  EXPECT_NEAR(rmse(f, v), std::sqrt(direct_weighted_mse(f, v)), 1e-12);
  EXPECT_EQ(rmse(v, v), 0.0);
  double plain = 0.0;
  for (std::size_t p = 0; p < g->size(); ++p) plain += std::pow(f.values()[p] - v.values()[p], 2) / g->size();
  EXPECT_NEAR(unweighted_mse(f, v), plain, 1e-12);
}

TEST(Rmse, RefusesIncomparableFields) {
  const auto f = random_field(make_grid(8, 16), 1);
  const auto other = random_field(make_grid(9, 16), 1);
  EXPECT_THROW(rmse(f, other), Error);
  const auto t2m = f.with_meta({"t2m", "m", {}, 0});
  const auto z500 = f.with_meta({"z500", "", {}, 0});
  try {
    rmse(t2m, z500);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FieldMismatch);
  }
}

TEST(Rmse, RegionalBandsRecomposeGlobalMse) {
  const auto g = make_grid(36, 72);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = random_field(g, seed, 2.0);
    const auto v = random_field(g, seed + 50, 1.0);
    const auto bands = regional_errors(f, v);
    double total = 0.0, area = 0.0;
    for (const auto& b : bands) {
      total += b.area_fraction * b.mse;
      area += b.area_fraction;
      EXPECT_NEAR(b.rmse * b.rmse, b.mse, 1e-12);
    }
    EXPECT_NEAR(area, 1.0, 1e-12);
    EXPECT_NEAR(total, weighted_mse(f, v), 1e-12);
  }
  // Tropics cover sin(20 deg) of the sphere.
  EXPECT_NEAR(regional_errors(random_field(g, 1), random_field(g, 2))[0].area_fraction, std::sin(20.0 * std::numbers::pi / 180.0), 0.01);
}

TEST(Rmse, ZonalMseUsesOneRow) {
  const auto g = make_grid(4, 8);
  std::vector<double> a(g->size(), 0.0);
  for (std::size_t j = 0; j < 8; ++j) a[g->index(2, j)] = j % 2 ? 2.0 : 0.0;
  EXPECT_DOUBLE_EQ(zonal_mse(ScalarField(g, a), ScalarField(g, std::vector<double>(g->size(), 0.0)), 2), 2.0);
}

TEST(Acc, MatchesDirectFormulaAndBounds) {
  const auto g = make_grid(12, 24);
  const std::vector<int> days{1};
  const auto clim = uniform_climatology(g, "t2m", 280.0, 2.0, days);
  FieldMeta meta{"t2m", "m", parse_iso8601("2021-01-01T00:00Z"), 0};
  const auto f = random_field(g, 4, 2.0, 280.5).with_meta(meta);
  const auto v = random_field(g, 5, 2.0, 280.0).with_meta(meta);
  double fa = 0.0, aa = 0.0, ff = 0.0;
  for (std::size_t i = 0; i < g->nlat(); ++i) {
    const double w = std::cos(g->lat_rad(i));
    for (std::size_t j = 0; j < g->nlon(); ++j) {
      const double x = f.at(i, j) - 280.0, y = v.at(i, j) - 280.0;
      fa += w * x * y;
      aa += w * y * y;
      ff += w * x * x;
    }
  }
  EXPECT_NEAR(acc(f, v, clim), fa / std::sqrt(ff * aa), 1e-12);
  EXPECT_NEAR(acc(v, v, clim), 1.0, 1e-12);
  const double centred = acc(f, v, clim, true);
  EXPECT_LE(std::abs(centred), 1.0);
}

TEST(Acc, ClimatologyForecastIsDegenerate) {
  const auto g = make_grid(12, 24);
  const std::vector<int> days{1};
  const auto clim = uniform_climatology(g, "t2m", 280.0, 2.0, days);
  FieldMeta meta{"t2m", "m", parse_iso8601("2021-01-01T00:00Z"), 0};
  const ScalarField f(g, std::vector<double>(g->size(), 280.0), meta);
  const auto v = random_field(g, 5, 2.0, 280.0).with_meta(meta);
  try {
    acc(f, v, clim);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateAnomaly);
  }
  // A valid time outside the climatology is not silently accepted.
  FieldMeta later{"t2m", "m", parse_iso8601("2021-06-01T00:00Z"), 0};
  EXPECT_THROW(acc(v.with_meta(later), v.with_meta(later), clim), Error);
}

TEST(ConfidenceInterval, StandardErrorTimes1645) {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  const auto ci = confidence_interval(s);
  EXPECT_DOUBLE_EQ(ci.mean, 2.5);
  EXPECT_NEAR(ci.half_width, 1.645 * std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
  EXPECT_EQ(ci.n, 4u);
  EXPECT_THROW(confidence_interval(std::vector<double>{1.0}), Error);
}

TEST(ConfidenceInterval, ShrinksLikeInverseRootN) {
  const auto a = testing::random_values(100, 7);
  std::vector<double> b;
  for (int r = 0; r < 4; ++r) b.insert(b.end(), a.begin(), a.end());
  const double ratio = confidence_interval(a).half_width / confidence_interval(b).half_width;
  EXPECT_NEAR(ratio, 2.0 * std::sqrt(399.0 / 396.0), 1e-9);
}

TEST(Scorecard, CompetitionRanksWithTiesAndNaN) {
  const std::vector<double> v{3.0, 1.0, 3.0, std::nan(""), 0.5};
  EXPECT_EQ(competition_ranks(v), (std::vector<int>{3, 2, 3, 5, 1}));
  std::vector<MetricSeries> series{
      {"a", "z500", "rmse", {24, 48}, {1.0, 2.0}, {}, {}},
      {"b", "z500", "rmse", {24, 48}, {0.5, 2.0}, {}, {}},
  };
  const auto card = scorecard(series);
  EXPECT_EQ(card.ranks[0], (std::vector<int>{2, 1}));
  EXPECT_EQ(card.ranks[1], (std::vector<int>{1, 1}));
  series[1].leads = {24, 72};
  EXPECT_THROW(scorecard(series), Error);
}

}  // namespace
}  // namespace wxdiag
