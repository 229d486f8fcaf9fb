#include <cmath>

#include <gtest/gtest.h>

#include "wxdiag/error.hpp"
#include "wxdiag/stats.hpp"

namespace wxdiag {
namespace {

TEST(Stats, FitLineRecoversExactLine) {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(f.intercept, -1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Stats, WeightedFitEqualsRepeatedSamples) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1.0, 2.5, 2.0, 5.0};
  const std::vector<double> w{1, 3, 2, 1};
  std::vector<double> xr, yr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 0; k < w[i]; ++k) {
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
  }
  const auto a = fit_line(x, y, w);
  const auto b = fit_line(xr, yr);
  EXPECT_NEAR(a.slope, b.slope, 1e-12);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-12);
}

TEST(Stats, FitLineNeedsTwoDistinctAbscissae) {
  const std::vector<double> x{1, 1, 1};
  const std::vector<double> y{1, 2, 3};
  EXPECT_THROW(fit_line(x, y), Error);
}

TEST(Stats, SampleSdAndPearson) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_NEAR(sample_sd(v), std::sqrt(32.0 / 7.0), 1e-12);
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{2, 4, 6, 8};
  const std::vector<double> c{4, 3, 2, 1};
  EXPECT_NEAR(pearson(a, b), 1.0, 1e-12);
  EXPECT_NEAR(pearson(a, c), -1.0, 1e-12);
  EXPECT_TRUE(std::isnan(pearson(a, std::vector<double>{1, 1, 1, 1})));
}

TEST(Stats, MidranksShareTiedPositions) {
  const std::vector<double> v{0.3, 0.9, 0.3, 0.1};
  EXPECT_EQ(midranks(v, false), (std::vector<double>{2.5, 4, 2.5, 1}));
  EXPECT_EQ(midranks(v, true), (std::vector<double>{2.5, 1, 2.5, 4}));
}

}  // namespace
}  // namespace wxdiag
