#pragma once

#include <span>
#include <vector>

#include "wxdiag/grid.hpp"

namespace wxdiag {

inline constexpr double kDoublingNormHours = 48.0;

struct GrowthFit {
  double lambda_eff = 0.0;   ///< per day
  double tau_d_hours = 0.0;  ///< +inf when lambda_eff <= 0
  double tau_d_norm = 1.0;   ///< min(1, tau_d_hours / 48)
  double day_lo = 1.0;
  double day_hi = 5.0;
  double r2 = 0.0;
};

/// Least-squares slope of ln RMSE against lead in days over [day_lo, day_hi].
/// Needs at least three leads in the window; RMSE must be positive there.
GrowthFit fit_lyapunov(std::span<const int> lead_hours, std::span<const double> rmse, double day_lo = 1.0,
                       double day_hi = 5.0);

/// Area-weighted mean of (u^2 + v^2) / 2.
double kinetic_energy(const ScalarField& u, const ScalarField& v);

/// KE(lead) / KE(first lead). Leads must pair up; throws MissingComponent
/// when u and v differ in count or lead.
std::vector<double> ke_ratio_series(std::span<const ScalarField> u, std::span<const ScalarField> v);

struct KeDrift {
  double gamma = 0.0;  ///< per day, signed
  double window_days = 0.0;
  double asi = 1.0;
};

/// max(0, min(1, 1 - |gamma| T / ln 2)).
double asi_from_gamma(double gamma_per_day, double window_days) noexcept;

/// gamma is the least-squares slope of ln ratio against lead days over
/// [0, T]; needs three leads in the window and positive ratios.
KeDrift asi(std::span<const int> lead_hours, std::span<const double> ke_ratio, double window_days);

}  // namespace wxdiag
