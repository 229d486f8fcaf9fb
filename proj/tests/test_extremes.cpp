#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/extremes.hpp"
#include "wxdiag/synth.hpp"

namespace wxdiag {
namespace {

using testing::make_grid;

const TimePoint kValid = parse_iso8601("2021-07-15T00:00Z");

struct TailSetup {
  GridPtr grid = make_grid(24, 48);
  Climatology clim = uniform_climatology(grid, "t2m", 280.0, 2.0, std::vector<int>{day_of_year(kValid)});
  FieldMeta meta{"t2m", "m", kValid, 0};

  ScalarField field(std::vector<double> v) const { return ScalarField(grid, std::move(v), meta); }
};

TEST(Exceedance, MaskAndDeltaFollowDefinition) {
  TailSetup s;
  auto v = testing::random_values(s.grid->size(), 3, 4.0, 280.0);
  const auto ex = exceedance_mask(s.field(v), s.clim);
  std::size_t n = 0;
  for (std::size_t p = 0; p < v.size(); ++p) {
    const double d = (v[p] - 280.0) / 2.0;
    EXPECT_EQ(ex.mask[p] != 0, d > 2.0);
    if (d > 2.0) {
      ++n;
      EXPECT_DOUBLE_EQ(ex.delta[p], d);
    } else {
      EXPECT_EQ(ex.delta[p], 0.0);
    }
  }
  EXPECT_EQ(ex.count, n);
  const auto cold = exceedance_mask(s.field(v), s.clim, 2.0, Tail::cold);
  for (std::size_t p = 0; p < v.size(); ++p) EXPECT_EQ(cold.mask[p] != 0, (280.0 - v[p]) / 2.0 > 2.0);
}

TEST(Exceedance, ZeroSigmaPointsAreSkipped) {
  const auto g = make_grid(8, 16);
  Climatology clim(g, "t2m");
  std::vector<double> sigma(g->size(), 1.0);
  sigma[5] = 0.0;
  clim.set_slot(day_of_year(kValid), kAnyHour, std::vector<double>(g->size(), 0.0), sigma);
  std::vector<double> v(g->size(), 10.0);
  const auto ex = exceedance_mask(ScalarField(g, v, {"t2m", "", kValid, 0}), clim);
  EXPECT_EQ(ex.mask[5], 0);
  EXPECT_EQ(ex.count, g->size() - 1);
}

TEST(Ees, MatchesDirectDefinition) {
  TailSetup s;
  const auto v = testing::random_values(s.grid->size(), 5, 4.0, 280.0);
  auto f = v;
  const auto noise = testing::random_values(f.size(), 6, 0.7);
  for (std::size_t p = 0; p < f.size(); ++p) f[p] += noise[p] + ((v[p] - 280.0) / 2.0 > 2.0 ? -1.5 : 0.0);
  double cn = 0, cd = 0, gn = 0, gd = 0;
  for (std::size_t i = 0; i < s.grid->nlat(); ++i) {
    const double w = std::cos(s.grid->lat_rad(i));
    for (std::size_t j = 0; j < s.grid->nlon(); ++j) {
      const std::size_t p = s.grid->index(i, j);
      const double e2 = (f[p] - v[p]) * (f[p] - v[p]);
      gn += w * e2;
      gd += w;
      if ((v[p] - 280.0) / 2.0 > 2.0) {
        cn += w * e2;
        cd += w;
      }
    }
  }
  const double expected = 1.0 - std::sqrt(cn / cd) / (3.0 * std::sqrt(gn / gd));
  EXPECT_NEAR(ees(s.field(f), s.field(v), s.clim), expected, 1e-12);
}

TEST(Ees, ErrorPaths) {
  TailSetup s;
  const auto calm = s.field(std::vector<double>(s.grid->size(), 280.0));
  try {
    ees(calm, calm, s.clim);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoExtremes);
  }
  const auto hot = s.field(testing::random_values(s.grid->size(), 1, 4.0, 280.0));
  try {
    ees(hot, hot, s.clim);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateErrors);
  }
}

TEST(TailCurve, LinearBiasGivesExactAlpha) {
  TailAccumulator acc;
  for (int i = 0; i < 4000; ++i) {
    const double delta = 2.0 + 4.0 * (i + 0.5) / 4000.0;
    acc.add_sample(delta, -0.37 * (delta - 2.0) + 0.05);
  }
  const auto c = acc.curve();
  EXPECT_NEAR(c.alpha, 0.37, 1e-12);
  EXPECT_NEAR(c.intercept, 0.37 * 2.0 + 0.05, 1e-12);
  EXPECT_EQ(c.bin_center.size(), 16u);
  EXPECT_DOUBLE_EQ(c.bin_center.front(), 2.125);
}

TEST(TailCurve, FitIgnoresBinsAboveFitRange) {
  TailAccumulator acc;
  for (int i = 0; i < 1000; ++i) {
    const double delta = 2.0 + 4.0 * (i + 0.5) / 1000.0;
    acc.add_sample(delta, delta < 5.0 ? -0.2 * (delta - 2.0) : 100.0);
  }
  EXPECT_NEAR(acc.curve().alpha, 0.2, 1e-12);
}

TEST(TailCurve, PlantedAlphaRecovered) {
  const auto g = make_grid(96, 192);
  for (double alpha : {0.0, 0.28, 0.44}) {
    const auto t = planted_tail_bias(alpha, g, 7);
    EXPECT_NEAR(tail_curve(t.forecast, t.verify, t.clim).alpha, alpha, 0.03) << alpha;
  }
}

TEST(TailCurve, ColdTailMirrorsWarmTail) {
  const auto g = make_grid(48, 96);
  const auto t = planted_tail_bias(0.3, g, 3);
  std::vector<double> f(t.forecast.values().begin(), t.forecast.values().end());
  std::vector<double> v(t.verify.values().begin(), t.verify.values().end());
  for (auto& x : f) x = 560.0 - x;  // reflect about mu = 280
  for (auto& x : v) x = 560.0 - x;
  TailOptions cold;
  cold.tail = Tail::cold;
  const auto warm_curve = tail_curve(t.forecast, t.verify, t.clim);
  const auto cold_curve = tail_curve(t.forecast.with_values(f), t.verify.with_values(v), t.clim, cold);
  EXPECT_NEAR(cold_curve.alpha, warm_curve.alpha, 1e-9);
}

TEST(TailCurve, ErrorPaths) {
  TailAccumulator empty;
  try {
    empty.curve();
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoExtremes);
  }
  TailAccumulator one_bin;
  one_bin.add_sample(2.1, 0.0);
  one_bin.add_sample(2.2, 0.0);
  try {
    one_bin.curve();
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientTail);
  }
}

TEST(AlphaEvolution, FlagsMissingLeads) {
  TailCurve c;
  c.alpha = 0.2;
  c.r2 = 0.9;
  const std::vector<int> leads{24, 48, 72};
  const std::vector<std::optional<TailCurve>> curves{c, std::nullopt, c};
  const auto ev = alpha_evolution(leads, curves);
  ASSERT_EQ(ev.points.size(), 2u);
  EXPECT_EQ(ev.points[1].lead_hours, 72);
  EXPECT_EQ(ev.flagged, std::vector<int>{48});
}

}  // namespace
}  // namespace wxdiag
