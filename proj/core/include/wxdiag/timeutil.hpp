#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace wxdiag {

using TimePoint = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM[:SS][Z]" (a space may replace the T).
/// Throws Error(FormatError) on anything else.
TimePoint parse_iso8601(std::string_view text);

/// Always emits "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(TimePoint t);

TimePoint add_hours(TimePoint t, int hours);

/// 1-based day of year (1..366).
int day_of_year(TimePoint t);
int hour_of_day(TimePoint t);
int year_of(TimePoint t);

}  // namespace wxdiag
