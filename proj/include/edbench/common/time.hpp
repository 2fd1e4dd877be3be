#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace edbench {

/// Seconds since 1970-01-01 00:00:00, no time zone. MIMIC dates are shifted
/// into the 22nd century, so only the proleptic Gregorian arithmetic matters.
struct Timestamp {
  std::int64_t seconds = 0;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

constexpr Timestamp operator+(Timestamp t, std::int64_t seconds) { return {t.seconds + seconds}; }
constexpr Timestamp operator-(Timestamp t, std::int64_t seconds) { return {t.seconds - seconds}; }
constexpr std::int64_t operator-(Timestamp a, Timestamp b) { return a.seconds - b.seconds; }

constexpr Timestamp hours_after(Timestamp t, double hours) {
  return {t.seconds + static_cast<std::int64_t>(hours * kSecondsPerHour)};
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                         int second = 0);

/// Parses `YYYY-MM-DD HH:MM:SS`. A bare `YYYY-MM-DD` is accepted as midnight.
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_timestamp(Timestamp t);
std::string format_date(Timestamp t);

int calendar_year(Timestamp t);

/// Midnight of the day containing `t`.
Timestamp start_of_day(Timestamp t);

/// Same wall-clock instant `years` calendar years earlier; Feb 29 maps to Feb 28.
Timestamp years_before(Timestamp t, int years);

double hours_between(Timestamp from, Timestamp to);

}  // namespace edbench
