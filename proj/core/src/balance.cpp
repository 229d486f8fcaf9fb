#include "wxdiag/balance.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wxdiag/error.hpp"

namespace wxdiag {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!same_grid(a.grid_ptr(), b.grid_ptr())) throw Error(ErrorKind::GridMismatch, "balance fields on different grids");
}

bool has_lon_stencil(const LatLonGrid& grid, std::size_t j) {
  return grid.periodic_lon() || (j > 0 && j + 1 < grid.nlon());
}

bool has_lat_stencil(const LatLonGrid& grid, std::size_t i) {
  return i > 0 && i + 1 < grid.nlat() && !grid.is_pole_row(i);
}

double masked_mean(const LatLonGrid& grid, const std::vector<double>& values, const Mask& mask) {
  if (count(mask) == 0) throw Error(ErrorKind::InvalidGrid, "empty midlatitude mask");
  return area_weighted_mean(grid, values, &mask);
}

double ratio_or_inf(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

double coriolis(double lat_deg, const PhysicalConstants& c) noexcept {
  return 2.0 * c.omega * std::sin(lat_deg * kDeg);
}

Mask midlatitude_mask(const LatLonGrid& grid, const PhysicalConstants& c) {
  Mask mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double lat = grid.lats()[i];
    const double a = std::abs(lat);
    if (a < c.mid_lat_lo || a > c.mid_lat_hi) continue;
    if (std::abs(coriolis(lat, c)) < c.f_floor) continue;
    if (!has_lat_stencil(grid, i)) continue;
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      if (has_lon_stencil(grid, j)) mask[grid.index(i, j)] = 1;
    }
  }
  return mask;
}

Gradient spherical_gradient(const LatLonGrid& grid, std::span<const double> values) {
  const std::size_t nlon = grid.nlon();
  Gradient g{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
  const double a = grid.radius();
  const double dlon = grid.dlon_rad();
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    if (grid.is_pole_row(i)) continue;
    const double cosl = grid.cos_lat(i);
    const bool lat_ok = has_lat_stencil(grid, i);
    const double dphi = lat_ok ? grid.lat_rad(i + 1) - grid.lat_rad(i - 1) : 0.0;
    for (std::size_t j = 0; j < nlon; ++j) {
      const std::size_t p = grid.index(i, j);
      if (has_lon_stencil(grid, j)) {
        const std::size_t jp = (j + 1) % nlon;
        const std::size_t jm = (j + nlon - 1) % nlon;
        g.east[p] = (values[grid.index(i, jp)] - values[grid.index(i, jm)]) / (2.0 * dlon * a * cosl);
      }
      if (lat_ok) {
        g.north[p] = (values[grid.index(i + 1, j)] - values[grid.index(i - 1, j)]) / (a * dphi);
      }
    }
  }
  return g;
}

namespace {

// (scale / f) k x grad(values), zeroed where f is below the floor.
WindField rotated_gradient(const ScalarField& field, double scale, const PhysicalConstants& c) {
  const auto& grid = field.grid();
  const auto g = spherical_gradient(grid, field.values());
  WindField w{std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double f = coriolis(grid.lats()[i], c);
    if (std::abs(f) < c.f_floor) continue;
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      w.u[p] = -scale * g.north[p] / f;
      w.v[p] = scale * g.east[p] / f;
    }
  }
  return w;
}

}  // namespace

WindField geostrophic_wind(const ScalarField& z, const PhysicalConstants& c) {
  return rotated_gradient(z, c.gravity, c);
}

WindField thermal_wind_shear(const ScalarField& t_layer, const PhysicalConstants& c) {
  return rotated_gradient(t_layer, c.r_dry * std::log(kLowerLevelHpa / kUpperLevelHpa), c);
}

double balance_pcs(double ratio, double max_ratio) noexcept {
  if (!std::isfinite(ratio)) return 0.0;
  return std::max(0.0, 1.0 - ratio / max_ratio);
}

BalanceScore geostrophic_score(const ScalarField& u, const ScalarField& v, const ScalarField& z,
                               const PhysicalConstants& c, const BalanceNormalizers& n) {
  require_same_grid(u, v);
  require_same_grid(u, z);
  const auto& grid = u.grid();
  const auto mask = midlatitude_mask(grid, c);
  const auto vg = geostrophic_wind(z, c);
  std::vector<double> ageo(grid.size()), speed(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double du = u.values()[p] - vg.u[p];
    const double dv = v.values()[p] - vg.v[p];
    ageo[p] = du * du + dv * dv;
    speed[p] = u.values()[p] * u.values()[p] + v.values()[p] * v.values()[p];
  }
  const double agr = std::sqrt(ratio_or_inf(masked_mean(grid, ageo, mask), masked_mean(grid, speed, mask)));
  return {agr, balance_pcs(agr, n.agr_max)};
}

BalanceScore nondivergence_score(const ScalarField& u, const ScalarField& v, const PhysicalConstants& c,
                                 const BalanceNormalizers& n) {
  require_same_grid(u, v);
  const auto& grid = u.grid();
  const auto mask = midlatitude_mask(grid, c);
  // div = (1/(a cos)) [du/dlon + d(v cos)/dphi]; vort = (1/(a cos)) [dv/dlon - d(u cos)/dphi]
  std::vector<double> ucos(grid.size()), vcos(grid.size());
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      ucos[p] = u.values()[p] * grid.cos_lat(i);
      vcos[p] = v.values()[p] * grid.cos_lat(i);
    }
  }
  const auto gu = spherical_gradient(grid, u.values());
  const auto gv = spherical_gradient(grid, v.values());
  const auto guc = spherical_gradient(grid, ucos);
  const auto gvc = spherical_gradient(grid, vcos);
  std::vector<double> div2(grid.size(), 0.0), vort2(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    if (grid.is_pole_row(i)) continue;
    const double cosl = grid.cos_lat(i);
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      const double div = gu.east[p] + gvc.north[p] / cosl;
      const double vort = gv.east[p] - guc.north[p] / cosl;
      div2[p] = div * div;
      vort2[p] = vort * vort;
    }
  }
  const double vort_mean = masked_mean(grid, vort2, mask);
  if (!(vort_mean > 0.0)) throw Error(ErrorKind::DegenerateFlow, "zero vorticity over the midlatitudes");
  const double ndr = masked_mean(grid, div2, mask) / vort_mean;
  return {ndr, balance_pcs(ndr, n.ndr_max)};
}

BalanceScore thermal_wind_score(const ScalarField& u500, const ScalarField& v500, const ScalarField& u850,
                                const ScalarField& v850, const ScalarField& t_layer, const PhysicalConstants& c,
                                const BalanceNormalizers& n) {
  require_same_grid(u500, v500);
  require_same_grid(u500, u850);
  require_same_grid(u500, v850);
  require_same_grid(u500, t_layer);
  const auto& grid = u500.grid();
  const auto mask = midlatitude_mask(grid, c);
  const auto tw = thermal_wind_shear(t_layer, c);
  std::vector<double> miss(grid.size()), shear(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double su = u500.values()[p] - u850.values()[p];
    const double sv = v500.values()[p] - v850.values()[p];
    const double du = su - tw.u[p];
    const double dv = sv - tw.v[p];
    miss[p] = du * du + dv * dv;
    shear[p] = su * su + sv * sv;
  }
  const double shear_mean = masked_mean(grid, shear, mask);
  if (!(shear_mean > 0.0)) throw Error(ErrorKind::DegenerateShear, "zero vertical shear over the midlatitudes");
  const double ratio = std::sqrt(masked_mean(grid, miss, mask) / shear_mean);
  return {ratio, balance_pcs(ratio, n.thermal_max)};
}

BalanceScore hydrostatic_score(const ScalarField& z500, const ScalarField& z850, const ScalarField& t_layer,
                               const PhysicalConstants& c, const BalanceNormalizers& n) {
  require_same_grid(z500, z850);
  require_same_grid(z500, t_layer);
  const auto& grid = z500.grid();
  const double lnp = std::log(kLowerLevelHpa / kUpperLevelHpa);
  std::vector<double> err(grid.size()), thick(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double actual = c.gravity * (z500.values()[p] - z850.values()[p]);
    const double expected = c.r_dry * t_layer.values()[p] * lnp;
    err[p] = std::abs(actual - expected);
    thick[p] = std::abs(actual);
  }
  const double thick_mean = area_weighted_mean(grid, thick);
  if (!(thick_mean > 0.0)) throw Error(ErrorKind::DegenerateThickness, "zero 500-850 hPa thickness");
  const double rel = area_weighted_mean(grid, err) / thick_mean;
  return {rel, balance_pcs(rel, n.hydro_max)};
}

BalanceReport pcs_composite(const std::optional<BalanceScore>& geo, const std::optional<BalanceScore>& ndiv,
                            const std::optional<BalanceScore>& thermal,
                            const std::optional<BalanceScore>& hydro) {
  if (!geo || !ndiv || !thermal || !hydro) throw Error(ErrorKind::IncompleteBalance, "a balance sub-score is missing");
  BalanceReport r{*geo, *ndiv, *thermal, *hydro, 0.0};
  r.composite = (r.geo.pcs + r.ndiv.pcs + r.thermal.pcs + r.hydro.pcs) / 4.0;
  return r;
}

BalanceReport evaluate_balance(const BalanceFields& f, const PhysicalConstants& c, const BalanceNormalizers& n) {
  std::optional<BalanceScore> geo, ndiv, thermal, hydro;
  if (f.u500 && f.v500 && f.z500) geo = geostrophic_score(*f.u500, *f.v500, *f.z500, c, n);
  if (f.u500 && f.v500) ndiv = nondivergence_score(*f.u500, *f.v500, c, n);
  if (f.u500 && f.v500 && f.u850 && f.v850 && f.t_layer) {
    thermal = thermal_wind_score(*f.u500, *f.v500, *f.u850, *f.v850, *f.t_layer, c, n);
  }
  if (f.z500 && f.z850 && f.t_layer) hydro = hydrostatic_score(*f.z500, *f.z850, *f.t_layer, c, n);
  return pcs_composite(geo, ndiv, thermal, hydro);
}

}  // namespace wxdiag
