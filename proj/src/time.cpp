#include "switchlens/time.hpp"

#include <cstdio>

#include "switchlens/errors.hpp"

namespace switchlens {
namespace {

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw ParseError("invalid timestamp '" + std::string(text) + "' (expected YYYY-MM-DDTHH:MM:SS.fffZ)");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!digits(text, 0, 4, y) || text.size() < 19 || text[4] != '-' || !digits(text, 5, 2, mo) ||
      text[7] != '-' || !digits(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
      !digits(text, 11, 2, h) || text[13] != ':' || !digits(text, 14, 2, mi) || text[16] != ':' ||
      !digits(text, 17, 2, s)) {
    bad(text);
  }
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t n = 0;
    int scale = 100;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (n >= 3) bad(text);
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
      ++n;
    }
    if (n == 0) bad(text);
  }
  const std::string_view zone = text.substr(pos);
  if (zone != "Z" && zone != "+00:00") bad(text);

  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) bad(text);
  return Timestamp{std::chrono::sys_days{ymd}.time_since_epoch()} + std::chrono::hours{h} +
         std::chrono::minutes{mi} + std::chrono::seconds{s} + Duration{millis};
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
  return buf;
}

Timestamp from_unix_millis(std::int64_t ms) { return Timestamp{Duration{ms}}; }

std::int64_t to_unix_millis(Timestamp t) { return t.time_since_epoch().count(); }

double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

std::string_view to_string(TimeOfDay t) {
  switch (t) {
    case TimeOfDay::Morning: return "morning";
    case TimeOfDay::Afternoon: return "afternoon";
    case TimeOfDay::Evening: return "evening";
  }
  return "evening";
}

TimeOfDay time_of_day(Timestamp t, int utc_offset_minutes) {
  const auto local = t + std::chrono::minutes{utc_offset_minutes};
  const auto since_midnight = local - std::chrono::floor<std::chrono::days>(local);
  const auto hour = std::chrono::duration_cast<std::chrono::hours>(since_midnight).count();
  if (hour >= 6 && hour < 12) return TimeOfDay::Morning;
  if (hour >= 12 && hour < 18) return TimeOfDay::Afternoon;
  return TimeOfDay::Evening;
}

}  // namespace switchlens
