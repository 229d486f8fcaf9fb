#include "wxdiag/climatology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "wxdiag/error.hpp"

namespace wxdiag {

bool is_temperature_variable(std::string_view variable) noexcept {
  return !variable.empty() && (variable.front() == 't' || variable.front() == 'T');
}

double sigma_floor_for(std::string_view variable) noexcept {
  return is_temperature_variable(variable) ? kTemperatureSigmaFloor : 0.0;
}

Climatology::Climatology(GridPtr grid, std::string variable)
    : grid_(std::move(grid)), variable_(std::move(variable)) {
  if (!grid_) throw Error(ErrorKind::InvalidGrid, "climatology without grid");
}

void Climatology::set_slot(int doy, int hour, std::vector<double> mu, std::vector<double> sigma) {
  if (doy < 1 || doy > kDaysInClimatologyYear) {
    throw Error(ErrorKind::InvalidField, fmt::format("day of year {} out of range", doy));
  }
  if (hour != kAnyHour && (hour < 0 || hour > 23)) {
    throw Error(ErrorKind::InvalidField, fmt::format("hour {} out of range", hour));
  }
  if (mu.size() != grid_->size() || sigma.size() != grid_->size()) {
    throw Error(ErrorKind::InvalidField, "climatology slot shape does not match grid");
  }
  for (std::size_t p = 0; p < mu.size(); ++p) {
    if (!std::isfinite(mu[p]) || !std::isfinite(sigma[p]) || sigma[p] < 0.0) {
      throw Error(ErrorKind::InvalidField, "climatology slot has invalid values");
    }
  }
  slots_.insert_or_assign({doy, hour}, ClimatologySlot{std::move(mu), std::move(sigma)});
}

const ClimatologySlot* Climatology::find(int doy, int hour) const {
  if (auto it = slots_.find({doy, hour}); it != slots_.end()) return &it->second;
  if (auto it = slots_.find({doy, kAnyHour}); it != slots_.end()) return &it->second;
  return nullptr;
}

bool Climatology::covers(TimePoint valid) const {
  return find(day_of_year(valid), hour_of_day(valid)) != nullptr;
}

const ClimatologySlot& Climatology::at(TimePoint valid) const {
  const auto* slot = find(day_of_year(valid), hour_of_day(valid));
  if (!slot) {
    throw Error(ErrorKind::InsufficientHistory,
                fmt::format("climatology for {} has no slot for {}", variable_, format_iso8601(valid)));
  }
  return *slot;
}

std::vector<std::pair<int, int>> Climatology::slot_keys() const {
  std::vector<std::pair<int, int>> keys;
  keys.reserve(slots_.size());
  for (const auto& [key, slot] : slots_) keys.push_back(key);
  return keys;
}

namespace {

int ring_distance(int a, int b) {
  const int d = std::abs(a - b);
  return std::min(d, kDaysInClimatologyYear - d);
}

}  // namespace

Climatology compute_climatology(std::span<const ScalarField> history, const ClimatologyOptions& options) {
  if (history.empty()) throw Error(ErrorKind::InsufficientHistory, "empty history");
  const auto& grid = history.front().grid_ptr();
  const auto& variable = history.front().meta().variable;
  std::set<int> years;
  std::set<int> hours;
  for (const auto& f : history) {
    if (!same_grid(f.grid_ptr(), grid)) throw Error(ErrorKind::GridMismatch, "history grids differ");
    if (f.meta().variable != variable) {
      throw Error(ErrorKind::FieldMismatch, "history mixes variables");
    }
    years.insert(year_of(f.meta().valid_time()));
    hours.insert(hour_of_day(f.meta().valid_time()));
  }
  if (years.size() < 2) {
    throw Error(ErrorKind::InsufficientHistory, "climatology needs at least two years of history");
  }
  const double floor = options.sigma_floor.value_or(sigma_floor_for(variable));
  const bool single_hour = hours.size() == 1;
  const std::size_t npts = grid->size();

  Climatology clim(grid, variable);
  for (int hour : hours) {
    std::vector<const ScalarField*> members;
    std::vector<int> member_doy;
    for (const auto& f : history) {
      if (hour_of_day(f.meta().valid_time()) != hour) continue;
      members.push_back(&f);
      member_doy.push_back(day_of_year(f.meta().valid_time()));
    }
    for (int doy = 1; doy <= kDaysInClimatologyYear; ++doy) {
      std::vector<const ScalarField*> pool;
      for (std::size_t s = 0; s < members.size(); ++s) {
        if (ring_distance(member_doy[s], doy) <= options.window_half_days) pool.push_back(members[s]);
      }
      if (pool.empty()) continue;
      std::vector<double> mu(npts, 0.0), sigma(npts, 0.0);
      for (const auto* f : pool) {
        const auto v = f->values();
        for (std::size_t p = 0; p < npts; ++p) mu[p] += v[p];
      }
      const double n = static_cast<double>(pool.size());
      for (auto& m : mu) m /= n;
      if (pool.size() > 1) {
        for (const auto* f : pool) {
          const auto v = f->values();
          for (std::size_t p = 0; p < npts; ++p) sigma[p] += (v[p] - mu[p]) * (v[p] - mu[p]);
        }
        for (auto& s : sigma) s = std::sqrt(s / (n - 1.0));
      }
      for (auto& s : sigma) s = std::max(s, floor);
      clim.set_slot(doy, single_hour ? kAnyHour : hour, std::move(mu), std::move(sigma));
    }
  }
  if (clim.slot_keys().empty()) throw Error(ErrorKind::InsufficientHistory, "every DOY window is empty");
  return clim;
}

}  // namespace wxdiag
