#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wxdiag/dynamics.hpp"
#include "wxdiag/error.hpp"
#include "wxdiag/synth.hpp"

namespace wxdiag {
namespace {

using testing::make_grid;

TEST(Lyapunov, RecoversPlantedGrowthRate) {
  std::vector<int> leads;
  std::vector<double> rmse;
  for (int h = 0; h <= 240; h += 12) {
    leads.push_back(h);
    rmse.push_back(3.0 * std::exp(0.4 * h / 24.0));
  }
  const auto fit = fit_lyapunov(leads, rmse);
  EXPECT_NEAR(fit.lambda_eff, 0.4, 1e-12);
  EXPECT_NEAR(fit.tau_d_hours, 24.0 * std::numbers::ln2 / 0.4, 1e-9);
  EXPECT_NEAR(fit.tau_d_norm, std::min(1.0, fit.tau_d_hours / 48.0), 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(Lyapunov, WindowExcludesSaturation) {
  std::vector<int> leads;
  std::vector<double> rmse;
  for (int d = 0; d <= 10; ++d) {
    leads.push_back(24 * d);
    rmse.push_back(d <= 5 ? std::exp(0.5 * d) : std::exp(2.5));  // flat after day 5
  }
  EXPECT_NEAR(fit_lyapunov(leads, rmse, 1.0, 5.0).lambda_eff, 0.5, 1e-12);
}

TEST(Lyapunov, NonGrowingErrorsHaveInfiniteDoublingTime) {
  const std::vector<int> leads{24, 48, 72, 96};
  const std::vector<double> rmse{2.0, 1.9, 1.8, 1.7};
  const auto fit = fit_lyapunov(leads, rmse);
  EXPECT_LT(fit.lambda_eff, 0.0);
  EXPECT_TRUE(std::isinf(fit.tau_d_hours));
  EXPECT_EQ(fit.tau_d_norm, 1.0);
}

TEST(Lyapunov, InvalidSeries) {
  auto kind = [](std::vector<int> l, std::vector<double> r) {
    try {
      fit_lyapunov(l, r);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind({24, 48}, {1.0, 2.0}), ErrorKind::InvalidSeries);
  EXPECT_EQ(kind({24, 48, 72}, {1.0, 0.0, 2.0}), ErrorKind::InvalidSeries);
  EXPECT_EQ(kind({24, 48, 72}, {1.0, 2.0}), ErrorKind::InvalidSeries);
}

TEST(Asi, ClosedForm) {
  EXPECT_NEAR(asi_from_gamma(-0.01, 15.0), 0.7836, 1e-4);
  EXPECT_NEAR(asi_from_gamma(-0.01, 15.0), 1.0 - 0.15 / std::numbers::ln2, 1e-15);
  EXPECT_EQ(asi_from_gamma(0.0, 15.0), 1.0);
  EXPECT_EQ(asi_from_gamma(0.01, 15.0), asi_from_gamma(-0.01, 15.0));
  EXPECT_EQ(asi_from_gamma(-1.0, 15.0), 0.0);
}

TEST(Asi, FitsDriftingSeries) {
  std::vector<int> leads;
  for (int h = 0; h <= 360; h += 24) leads.push_back(h);
  for (double gamma : {-0.05, -0.01, 0.0, 0.02}) {
    const auto ratio = drifting_ke_series(gamma, leads);
    const auto d = asi(leads, ratio, 15.0);
    EXPECT_NEAR(d.gamma, gamma, 1e-12);
    EXPECT_NEAR(d.asi, asi_from_gamma(gamma, 15.0), 1e-12);
  }
}

TEST(KineticEnergy, RatioSeriesIsRelativeToFirstLead) {
  const auto g = make_grid(8, 16);
  std::vector<ScalarField> u, v;
  for (int l = 0; l < 3; ++l) {
    const double s = 1.0 + 0.5 * l;
    FieldMeta meta{"u500", "m", {}, 24 * l};
    u.emplace_back(g, std::vector<double>(g->size(), 2.0 * s), meta);
    meta.variable = "v500";
    v.emplace_back(g, std::vector<double>(g->size(), 1.0 * s), meta);
  }
  EXPECT_NEAR(kinetic_energy(u[0], v[0]), 2.5, 1e-12);
  const auto r = ke_ratio_series(u, v);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  EXPECT_NEAR(r[2], 4.0, 1e-12);
  try {
    ke_ratio_series(u, std::span<const ScalarField>(v).first(2));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingComponent);
  }
}

}  // namespace
}  // namespace wxdiag
