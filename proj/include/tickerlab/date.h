#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tickerlab {

// Calendar date (UTC, no time component).
using Date = std::chrono::sys_days;

// Strict `YYYY-MM-DD`; returns nullopt for anything else, including
// impossible calendar dates.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date date);

std::int64_t to_unix_seconds(Date date);

// Date containing the given instant after applying `utc_offset_seconds`.
Date from_unix_seconds(std::int64_t seconds, std::int64_t utc_offset_seconds = 0);

}  // namespace tickerlab
