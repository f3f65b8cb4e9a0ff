#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace kmodel {

/// Timezone-naive local wall-clock time at second precision. The epoch is
/// only used for arithmetic; nothing is converted to or from UTC.
using TimePoint = std::chrono::sys_seconds;

/// Accepts `YYYY-MM-DD HH:MM[:SS]`, with either a space or `T` between
/// date and time, and a bare `YYYY-MM-DD` (midnight).
std::optional<TimePoint> try_parse_time(std::string_view text);

/// Throws ParseError on malformed input.
TimePoint parse_time(std::string_view text);

/// `YYYY-MM-DD HH:MM:SS`
std::string format_time(TimePoint t);

/// `YYYY-MM-DDTHH:MM:SS`, used in line-delimited files so fields never
/// contain spaces.
std::string format_time_iso(TimePoint t);

inline std::int64_t seconds_between(TimePoint from, TimePoint to) {
  return (to - from).count();
}

}  // namespace kmodel
