#include "wxdiag/timeutil.hpp"

#include <charconv>

#include <fmt/format.h>

#include "wxdiag/error.hpp"

namespace wxdiag {

namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) {
    throw Error(ErrorKind::FormatError, "truncated timestamp '" + std::string(text) + "'");
  }
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorKind::FormatError, "bad number in timestamp '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, std::string_view allowed) {
  if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos) {
    throw Error(ErrorKind::FormatError, "malformed timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

TimePoint parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  expect_char(text, 4, "-");
  expect_char(text, 7, "-");
  expect_char(text, 10, "T ");
  expect_char(text, 13, ":");
  const int y = parse_int(text, 0, 4);
  const int mo = parse_int(text, 5, 2);
  const int d = parse_int(text, 8, 2);
  const int h = parse_int(text, 11, 2);
  const int mi = parse_int(text, 14, 2);
  int s = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    s = parse_int(text, pos + 1, 2);
    pos += 3;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) {
    throw Error(ErrorKind::FormatError, "trailing characters in timestamp '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorKind::FormatError, "invalid date in timestamp '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

TimePoint add_hours(TimePoint t, int hours) { return t + std::chrono::hours{hours}; }

int day_of_year(TimePoint t) {
  using namespace std::chrono;
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  const sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((d - jan1).count()) + 1;
}

int hour_of_day(TimePoint t) {
  using namespace std::chrono;
  return static_cast<int>(duration_cast<hours>(t - floor<days>(t)).count());
}

int year_of(TimePoint t) {
  using namespace std::chrono;
  return static_cast<int>(year_month_day{floor<days>(t)}.year());
}

}  // namespace wxdiag
