#include "kmodel/time.hpp"

#include <charconv>

#include <fmt/format.h>

#include "kmodel/error.hpp"

namespace kmodel {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width,
              int& out) {
  if (pos + width > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + width;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  return std::from_chars(first, last, out).ec == std::errc{};
}

}  // namespace

std::optional<TimePoint> try_parse_time(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_int(text, 5, 2, mo) || text[7] != '-' || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  if (text.size() > 10) {
    if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
    if (!read_int(text, 11, 2, h) || text.size() < 16 || text[13] != ':' ||
        !read_int(text, 14, 2, mi)) {
      return std::nullopt;
    }
    if (text.size() == 19) {
      if (text[16] != ':' || !read_int(text, 17, 2, s)) return std::nullopt;
    } else if (text.size() != 16) {
      return std::nullopt;
    }
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

TimePoint parse_time(std::string_view text) {
  if (auto t = try_parse_time(text)) return *t;
  throw ParseError("invalid timestamp '" + std::string(text) + "'", 0);
}

namespace {

std::string format_with(TimePoint t, char sep) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  return fmt::format("{:04}-{:02}-{:02}{}{:02}:{:02}:{:02}",
                     static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()), sep,
                     hms.hours().count(), hms.minutes().count(),
                     hms.seconds().count());
}

}  // namespace

std::string format_time(TimePoint t) { return format_with(t, ' '); }
std::string format_time_iso(TimePoint t) { return format_with(t, 'T'); }

}  // namespace kmodel
