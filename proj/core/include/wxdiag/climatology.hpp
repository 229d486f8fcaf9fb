#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wxdiag/grid.hpp"

namespace wxdiag {

/// Slot hour used when the history carried a single synoptic hour; such a
/// slot answers lookups for any hour of its day.
inline constexpr int kAnyHour = -1;
inline constexpr int kDaysInClimatologyYear = 366;
inline constexpr double kTemperatureSigmaFloor = 0.5;

bool is_temperature_variable(std::string_view variable) noexcept;
double sigma_floor_for(std::string_view variable) noexcept;

struct ClimatologySlot {
  std::vector<double> mu;
  std::vector<double> sigma;
};

/// Per grid point mean and standard deviation keyed by (day of year, hour).
class Climatology {
 public:
  Climatology(GridPtr grid, std::string variable);

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const LatLonGrid& grid() const noexcept { return *grid_; }
  const std::string& variable() const noexcept { return variable_; }

  void set_slot(int doy, int hour, std::vector<double> mu, std::vector<double> sigma);

  /// Exact (doy, hour) slot, falling back to the (doy, kAnyHour) slot.
  const ClimatologySlot* find(int doy, int hour) const;
  bool covers(TimePoint valid) const;
  /// Throws InsufficientHistory when the valid time's slot is absent.
  const ClimatologySlot& at(TimePoint valid) const;

  std::vector<std::pair<int, int>> slot_keys() const;

 private:
  GridPtr grid_;
  std::string variable_;
  std::map<std::pair<int, int>, ClimatologySlot> slots_;
};

struct ClimatologyOptions {
  /// Samples within this many days of the target DOY (wrapping) are pooled.
  int window_half_days = 7;
  /// Overrides the per-variable floor (0.5 K for temperatures, 0 otherwise).
  std::optional<double> sigma_floor;
};

/// Pools history fields by day-of-year window and hour of day. DOY 366 is
/// treated as one more slot on a 366-day ring, so Feb 29 borrows from its
/// neighbours. Requires at least two distinct years.
Climatology compute_climatology(std::span<const ScalarField> history,
                                const ClimatologyOptions& options = {});

}  // namespace wxdiag
