#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace switchlens {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

/// Parses `YYYY-MM-DDTHH:MM:SS[.fff]Z` (a `+00:00` suffix is also accepted).
/// Throws ParseError on anything else.
Timestamp parse_timestamp(std::string_view text);

/// Always emits millisecond precision with a trailing `Z`.
std::string format_timestamp(Timestamp t);

Timestamp from_unix_millis(std::int64_t ms);
std::int64_t to_unix_millis(Timestamp t);

double to_seconds(Duration d);

enum class TimeOfDay { Morning, Afternoon, Evening };

std::string_view to_string(TimeOfDay t);

// morning [06:00,12:00), afternoon [12:00,18:00), evening otherwise,
// evaluated in local time at the given fixed UTC offset.
TimeOfDay time_of_day(Timestamp t, int utc_offset_minutes = 0);

}  // namespace switchlens
