#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wxdiag/grid.hpp"

namespace wxdiag {

inline constexpr double kGravity = 9.80665;
inline constexpr double kLowerLevelHpa = 850.0;
inline constexpr double kUpperLevelHpa = 500.0;

struct PhysicalConstants {
  double omega = 7.2921e-5;  ///< rad/s
  double r_dry = 287.05;     ///< J/(kg K)
  double gravity = kGravity;
  double f_floor = 1e-5;     ///< |f| below this is treated as equatorial
  double mid_lat_lo = 20.0;
  double mid_lat_hi = 70.0;
};

/// Ratio at which each sub-score reaches zero.
struct BalanceNormalizers {
  double agr_max = 1.0;
  double ndr_max = 1.0;
  double thermal_max = 2.0;
  double hydro_max = 0.05;
};

double coriolis(double lat_deg, const PhysicalConstants& c = {}) noexcept;

/// Points with mid_lat_lo <= |lat| <= mid_lat_hi, |f| >= f_floor and a full
/// centred stencil (interior row, periodic or interior column). Pole rows are
/// always excluded.
Mask midlatitude_mask(const LatLonGrid& grid, const PhysicalConstants& c = {});

/// Centred-difference gradient on the sphere: east = d/(a cos lat dlon),
/// north = d/(a dlat). Zero where the stencil is unavailable or at poles.
struct Gradient {
  std::vector<double> east;
  std::vector<double> north;
};
Gradient spherical_gradient(const LatLonGrid& grid, std::span<const double> values);

struct WindField {
  std::vector<double> u;
  std::vector<double> v;
};

/// (1/f) k x grad(g z) with the same stencil the scores use; zero where
/// |f| < f_floor or the stencil is unavailable.
WindField geostrophic_wind(const ScalarField& z, const PhysicalConstants& c = {});

/// v500 - v850 implied by a layer temperature: (R/f) ln(850/500) k x grad T.
WindField thermal_wind_shear(const ScalarField& t_layer, const PhysicalConstants& c = {});

struct BalanceScore {
  double ratio = 0.0;
  double pcs = 0.0;
};

/// max(0, 1 - ratio / max_ratio); infinite ratios score 0.
double balance_pcs(double ratio, double max_ratio) noexcept;

/// Ageostrophic wind ratio over the midlatitude mask.
BalanceScore geostrophic_score(const ScalarField& u, const ScalarField& v, const ScalarField& z,
                               const PhysicalConstants& c = {}, const BalanceNormalizers& n = {});

/// <div^2> / <vort^2> over the midlatitude mask. Throws DegenerateFlow.
BalanceScore nondivergence_score(const ScalarField& u, const ScalarField& v, const PhysicalConstants& c = {},
                                 const BalanceNormalizers& n = {});

/// Throws DegenerateShear when the actual shear is zero over the mask.
BalanceScore thermal_wind_score(const ScalarField& u500, const ScalarField& v500, const ScalarField& u850,
                                const ScalarField& v850, const ScalarField& t_layer,
                                const PhysicalConstants& c = {}, const BalanceNormalizers& n = {});

/// <|g dz - R T ln(850/500)|> / <|g dz|> globally. Throws DegenerateThickness.
BalanceScore hydrostatic_score(const ScalarField& z500, const ScalarField& z850, const ScalarField& t_layer,
                               const PhysicalConstants& c = {}, const BalanceNormalizers& n = {});

struct BalanceReport {
  BalanceScore geo;
  BalanceScore ndiv;
  BalanceScore thermal;
  BalanceScore hydro;
  double composite = 0.0;
};

/// Equal-weight mean of the four sub-scores. Throws IncompleteBalance.
BalanceReport pcs_composite(const std::optional<BalanceScore>& geo, const std::optional<BalanceScore>& ndiv,
                            const std::optional<BalanceScore>& thermal,
                            const std::optional<BalanceScore>& hydro);

/// Fields for a full evaluation; null members make the report incomplete.
struct BalanceFields {
  const ScalarField* u500 = nullptr;
  const ScalarField* v500 = nullptr;
  const ScalarField* u850 = nullptr;
  const ScalarField* v850 = nullptr;
  const ScalarField* z500 = nullptr;
  const ScalarField* z850 = nullptr;
  const ScalarField* t_layer = nullptr;
};

BalanceReport evaluate_balance(const BalanceFields& f, const PhysicalConstants& c = {},
                               const BalanceNormalizers& n = {});

}  // namespace wxdiag
