#include "wxdiag/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wxdiag/error.hpp"

namespace wxdiag {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kStepTolerance = 1e-9;

}  // namespace

LatLonGrid::LatLonGrid(std::vector<double> lats_deg, std::vector<double> lons_deg, double radius_m)
    : lats_(std::move(lats_deg)), lons_(std::move(lons_deg)), radius_(radius_m) {
  if (lats_.size() < 3 || lons_.size() < 4) {
    throw Error(ErrorKind::InvalidGrid, "grid needs nlat >= 3 and nlon >= 4");
  }
  if (!(radius_ > 0.0)) throw Error(ErrorKind::InvalidGrid, "radius must be positive");
  for (std::size_t i = 0; i < lats_.size(); ++i) {
    if (!std::isfinite(lats_[i]) || lats_[i] < -90.0 || lats_[i] > 90.0) {
      throw Error(ErrorKind::InvalidGrid, "latitude outside [-90, 90]");
    }
    if (i > 0 && !(lats_[i] > lats_[i - 1])) {
      throw Error(ErrorKind::InvalidGrid, "latitudes must be strictly ascending");
    }
  }
  const double step = lons_[1] - lons_[0];
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidGrid, "longitudes must be increasing");
  for (std::size_t j = 1; j < lons_.size(); ++j) {
    if (!std::isfinite(lons_[j]) || std::abs((lons_[j] - lons_[j - 1]) - step) > kStepTolerance) {
      throw Error(ErrorKind::InvalidGrid, "longitudes must be uniformly spaced");
    }
  }
  const double span = step * static_cast<double>(lons_.size() - 1);
  if (!(span < 360.0)) throw Error(ErrorKind::InvalidGrid, "longitude span must be < 360");
  periodic_ = std::abs(step * static_cast<double>(lons_.size()) - 360.0) < 1e-6;

  const double lat_step = lats_[1] - lats_[0];
  lat_uniform_ = true;
  for (std::size_t i = 1; i < lats_.size(); ++i) {
    if (std::abs((lats_[i] - lats_[i - 1]) - lat_step) > kStepTolerance) lat_uniform_ = false;
  }

  cos_lat_.resize(lats_.size());
  for (std::size_t i = 0; i < lats_.size(); ++i) {
    cos_lat_[i] = (std::abs(lats_[i]) == 90.0) ? 0.0 : std::cos(lats_[i] * kDegToRad);
  }
  const double mean_cos =
      std::accumulate(cos_lat_.begin(), cos_lat_.end(), 0.0) / static_cast<double>(lats_.size());
  row_weights_.resize(lats_.size());
  for (std::size_t i = 0; i < lats_.size(); ++i) row_weights_[i] = cos_lat_[i] / mean_cos;
}

LatLonGrid LatLonGrid::regular(std::size_t nlat, std::size_t nlon, double radius_m) {
  std::vector<double> lats(nlat), lons(nlon);
  const double dlat = 180.0 / static_cast<double>(nlat);
  for (std::size_t i = 0; i < nlat; ++i) lats[i] = -90.0 + (static_cast<double>(i) + 0.5) * dlat;
  const double dlon = 360.0 / static_cast<double>(nlon);
  for (std::size_t j = 0; j < nlon; ++j) lons[j] = static_cast<double>(j) * dlon;
  return LatLonGrid(std::move(lats), std::move(lons), radius_m);
}

LatLonGrid LatLonGrid::regular_with_poles(std::size_t nlat, std::size_t nlon, double radius_m) {
  if (nlat < 3) throw Error(ErrorKind::InvalidGrid, "grid needs nlat >= 3");
  std::vector<double> lats(nlat), lons(nlon);
  const double dlat = 180.0 / static_cast<double>(nlat - 1);
  for (std::size_t i = 0; i < nlat; ++i) lats[i] = -90.0 + static_cast<double>(i) * dlat;
  lats.front() = -90.0;
  lats.back() = 90.0;
  const double dlon = 360.0 / static_cast<double>(nlon);
  for (std::size_t j = 0; j < nlon; ++j) lons[j] = static_cast<double>(j) * dlon;
  return LatLonGrid(std::move(lats), std::move(lons), radius_m);
}

double LatLonGrid::lat_rad(std::size_t i) const noexcept { return lats_[i] * kDegToRad; }

double LatLonGrid::dlon_rad() const noexcept { return (lons_[1] - lons_[0]) * kDegToRad; }

double LatLonGrid::dlat_rad() const noexcept { return (lats_[1] - lats_[0]) * kDegToRad; }

bool LatLonGrid::is_pole_row(std::size_t i) const noexcept { return std::abs(lats_[i]) == 90.0; }

bool operator==(const LatLonGrid& a, const LatLonGrid& b) {
  return a.radius_ == b.radius_ && a.lats_ == b.lats_ && a.lons_ == b.lons_;
}

bool same_grid(const GridPtr& a, const GridPtr& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

std::size_t count(const Mask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m != 0; }));
}

std::string_view to_string(Band band) noexcept {
  switch (band) {
    case Band::tropics: return "tropics";
    case Band::extratropics: return "extratropics";
    case Band::polar: return "polar";
  }
  return "unknown";
}

Mask band_mask(const LatLonGrid& grid, Band band) {
  Mask mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double a = std::abs(grid.lats()[i]);
    bool in = false;
    switch (band) {
      case Band::tropics: in = a < 20.0; break;
      case Band::extratropics: in = a >= 20.0 && a < 60.0; break;
      case Band::polar: in = a >= 60.0; break;
    }
    if (in) std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(grid.index(i, 0)), grid.nlon(), 1);
  }
  return mask;
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values, FieldMeta meta)
    : grid_(std::move(grid)), values_(std::move(values)), meta_(std::move(meta)) {
  if (!grid_) throw Error(ErrorKind::InvalidField, "field without grid");
  if (values_.size() != grid_->size()) {
    throw Error(ErrorKind::InvalidField, "value count does not match grid shape");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::InvalidField, "non-finite value in field '" + meta_.variable + "'");
  }
  if (meta_.lead_hours < 0) throw Error(ErrorKind::InvalidField, "negative lead time");
}

ScalarField ScalarField::with_values(std::vector<double> values) const {
  return ScalarField(grid_, std::move(values), meta_);
}

ScalarField ScalarField::with_meta(FieldMeta meta) const {
  return ScalarField(grid_, values_, std::move(meta));
}

double area_weighted_mean(const LatLonGrid& grid, std::span<const double> values, const Mask* mask) {
  if (values.size() != grid.size()) throw Error(ErrorKind::InvalidField, "value count mismatch");
  if (mask && mask->size() != grid.size()) throw Error(ErrorKind::InvalidField, "mask size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    const double w = grid.row_weight(i);
    double row = 0.0;
    double row_w = 0.0;
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      const std::size_t p = grid.index(i, j);
      const double v = values[p];
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidField, "non-finite value");
      if (mask && !(*mask)[p]) continue;
      row += v;
      row_w += 1.0;
    }
    num += w * row;
    den += w * row_w;
  }
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidField, "mask has zero area weight");
  return num / den;
}

double area_weighted_mean(const ScalarField& field, const Mask* mask) {
  return area_weighted_mean(field.grid(), field.values(), mask);
}

double mask_weight(const LatLonGrid& grid, const Mask& mask) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.nlat(); ++i) {
    for (std::size_t j = 0; j < grid.nlon(); ++j) {
      if (mask[grid.index(i, j)]) total += grid.row_weight(i);
    }
  }
  return total;
}

}  // namespace wxdiag
