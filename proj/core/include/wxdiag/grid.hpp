#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wxdiag/timeutil.hpp"

namespace wxdiag {

inline constexpr double kEarthRadius = 6.371e6;

/// Equiangular latitude-longitude grid. Latitudes are stored ascending;
/// readers of descending files re-row their values before building a field.
///
/// Area weights are cos(lat) normalised so that their mean over all grid
/// points is 1. Pole rows get exactly zero weight.
class LatLonGrid {
 public:
  LatLonGrid(std::vector<double> lats_deg, std::vector<double> lons_deg,
             double radius_m = kEarthRadius);

  /// Cell-centred latitudes (no pole rows), longitudes starting at 0.
  static LatLonGrid regular(std::size_t nlat, std::size_t nlon, double radius_m = kEarthRadius);
  /// Latitudes from -90 to 90 inclusive.
  static LatLonGrid regular_with_poles(std::size_t nlat, std::size_t nlon,
                                       double radius_m = kEarthRadius);

  std::size_t nlat() const noexcept { return lats_.size(); }
  std::size_t nlon() const noexcept { return lons_.size(); }
  std::size_t size() const noexcept { return lats_.size() * lons_.size(); }
  double radius() const noexcept { return radius_; }

  std::span<const double> lats() const noexcept { return lats_; }
  std::span<const double> lons() const noexcept { return lons_; }
  double lat_rad(std::size_t i) const noexcept;
  double cos_lat(std::size_t i) const noexcept { return cos_lat_[i]; }

  /// Normalised area weight of every point in row i.
  double row_weight(std::size_t i) const noexcept { return row_weights_[i]; }
  std::span<const double> row_weights() const noexcept { return row_weights_; }

  double dlon_rad() const noexcept;
  /// Latitude step in radians; only meaningful when lat_uniform().
  double dlat_rad() const noexcept;
  bool lat_uniform() const noexcept { return lat_uniform_; }
  /// True when the longitudes close the full circle (nlon * step == 360).
  bool periodic_lon() const noexcept { return periodic_; }
  bool is_pole_row(std::size_t i) const noexcept;

  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * lons_.size() + j; }

  friend bool operator==(const LatLonGrid& a, const LatLonGrid& b);

 private:
  std::vector<double> lats_;
  std::vector<double> lons_;
  double radius_;
  std::vector<double> cos_lat_;
  std::vector<double> row_weights_;
  bool lat_uniform_ = false;
  bool periodic_ = false;
};

using GridPtr = std::shared_ptr<const LatLonGrid>;

bool same_grid(const GridPtr& a, const GridPtr& b);

/// One byte per grid point, row-major like field values.
using Mask = std::vector<std::uint8_t>;

std::size_t count(const Mask& mask);

enum class Band { tropics, extratropics, polar };

std::string_view to_string(Band band) noexcept;

/// tropics |lat| < 20, extratropics 20 <= |lat| < 60, polar |lat| >= 60.
Mask band_mask(const LatLonGrid& grid, Band band);

struct FieldMeta {
  std::string variable;
  std::string model;
  TimePoint init_time{};
  int lead_hours = 0;

  TimePoint valid_time() const { return add_hours(init_time, lead_hours); }
};

/// Immutable 2D field on a shared grid. Construction rejects non-finite values.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values, FieldMeta meta = {});

  const LatLonGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[grid_->index(i, j)]; }
  const FieldMeta& meta() const noexcept { return meta_; }

  ScalarField with_values(std::vector<double> values) const;
  ScalarField with_meta(FieldMeta meta) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  FieldMeta meta_;
};

/// sum(w * v) / sum(w) over the mask (all points when mask is null).
/// Throws InvalidField on non-finite input or when the masked weight is zero.
double area_weighted_mean(const LatLonGrid& grid, std::span<const double> values,
                          const Mask* mask = nullptr);
double area_weighted_mean(const ScalarField& field, const Mask* mask = nullptr);

/// Sum of normalised area weights over the mask.
double mask_weight(const LatLonGrid& grid, const Mask& mask);

}  // namespace wxdiag
