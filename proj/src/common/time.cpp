#include "edbench/common/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace edbench {
namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::sys_days;
using std::chrono::year;
using std::chrono::year_month_day;

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

year_month_day ymd_of(Timestamp t) {
  return year_month_day{sys_days{std::chrono::days{floor_div(t.seconds, kSecondsPerDay)}}};
}

}  // namespace

Timestamp make_timestamp(int y, unsigned m, unsigned d, int hour, int minute, int second) {
  const sys_days days{year{y} / month{m} / day{d}};
  return {days.time_since_epoch().count() * kSecondsPerDay + hour * kSecondsPerHour +
          minute * 60 + second};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.size() != 10 && text.size() != 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (text.size() == 19) {
    if (text[10] != ' ' || text[13] != ':' || text[16] != ':') return std::nullopt;
    if (!parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi) ||
        !parse_int(text.substr(17, 2), s)) {
      return std::nullopt;
    }
    if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  }
  if (mo < 1 || d < 1) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

std::string format_timestamp(Timestamp t) {
  const auto ymd = ymd_of(t);
  const std::int64_t secs = t.seconds - floor_div(t.seconds, kSecondsPerDay) * kSecondsPerDay;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::string format_date(Timestamp t) { return format_timestamp(t).substr(0, 10); }

int calendar_year(Timestamp t) { return static_cast<int>(ymd_of(t).year()); }

Timestamp start_of_day(Timestamp t) {
  return {floor_div(t.seconds, kSecondsPerDay) * kSecondsPerDay};
}

Timestamp years_before(Timestamp t, int years) {
  const auto ymd = ymd_of(t);
  year_month_day shifted{ymd.year() - std::chrono::years{years}, ymd.month(), ymd.day()};
  if (!shifted.ok()) {
    shifted = year_month_day{shifted.year() / shifted.month() / std::chrono::last};
  }
  const std::int64_t time_of_day = t.seconds - start_of_day(t).seconds;
  return {sys_days{shifted}.time_since_epoch().count() * kSecondsPerDay + time_of_day};
}

double hours_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to - from) / static_cast<double>(kSecondsPerHour);
}

}  // namespace edbench
