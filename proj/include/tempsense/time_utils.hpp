#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tempsense {

using TimePoint = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

// Accepts "2023-01-01T12:34:56Z", "2023-01-01 12:34:56", offsets like
// "+02:00" / "-0530" / "+02", and optional fractional seconds (truncated).
// Naive timestamps are interpreted as UTC.
std::optional<TimePoint> parse_iso8601(std::string_view text);

std::string format_utc(TimePoint t);          // 2023-01-01T12:34:56Z
std::string format_compact_utc(TimePoint t);  // 20230101T123456Z, for file names

// Largest/smallest grid point not after/before t, on the grid
// {k * interval} anchored at the Unix epoch.
TimePoint floor_to(TimePoint t, Seconds interval);
TimePoint ceil_to(TimePoint t, Seconds interval);

double hour_of_day_utc(TimePoint t);  // fractional hours, [0, 24)
bool is_weekend_utc(TimePoint t);
int day_of_year_utc(TimePoint t);     // 0-based
std::string month_key_utc(TimePoint t);  // "2023-01"

}  // namespace tempsense
