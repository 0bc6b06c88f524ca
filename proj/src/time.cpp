#include "epf/time.hpp"

#include <chrono>
#include <cstdio>

#include "epf/errors.hpp"

namespace epf {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

int num(const std::string& s, std::size_t from, std::size_t count) {
  int v = 0;
  for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

}  // namespace

UnixTime parse_timestamp(const std::string& s) {
  // YYYY-MM-DD[T ]HH:MM[:SS][Z]
  const auto fail = [&]() -> UnixTime {
    throw ParseError("unparseable timestamp: '" + s + "'");
  };
  if (s.size() < 16) return fail();
  if (!all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 2) || s[7] != '-' ||
      !all_digits(s, 8, 2) || (s[10] != 'T' && s[10] != ' ') || !all_digits(s, 11, 2) ||
      s[13] != ':' || !all_digits(s, 14, 2)) {
    return fail();
  }
  int sec = 0;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!all_digits(s, pos + 1, 2)) return fail();
    sec = num(s, pos + 1, 2);
    pos += 3;
  }
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      // ok
    } else {
      return fail();  // offsets other than Z are refused: the engine is UTC-only
    }
  }

  const int year = num(s, 0, 4), month = num(s, 5, 2), day = num(s, 8, 2);
  const int hour = num(s, 11, 2), minute = num(s, 14, 2);

  namespace chr = std::chrono;
  const chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                                chr::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || sec > 59) return fail();
  const chr::sys_days sd{ymd};
  return static_cast<UnixTime>(sd.time_since_epoch().count()) * 86400 + hour * 3600 +
         minute * 60 + sec;
}

std::string format_timestamp(UnixTime t) {
  namespace chr = std::chrono;
  // floor division for pre-1970 times
  std::int64_t days = t / 86400;
  std::int64_t rem = t - days * 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  const int hour = static_cast<int>(rem / 3600);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), hour);
  return buf;
}

HourlyCalendar::HourlyCalendar(UnixTime start, long length) : start_(start), length_(length) {
  if (start % kSecondsPerHour != 0) {
    throw ConfigError("calendar start is not hour-aligned: " + std::to_string(start));
  }
  if (length < 0) throw ConfigError("negative calendar length");
}

int HourlyCalendar::hour_of_day(long t) const {
  const UnixTime ts = time_of(t);
  std::int64_t h = (ts / kSecondsPerHour) % kHoursPerDay;
  if (h < 0) h += kHoursPerDay;
  return static_cast<int>(h) + 1;
}

int HourlyCalendar::weekday_of(long t) const {
  const UnixTime ts = time_of(t);
  std::int64_t days = ts / 86400;
  if (ts % 86400 < 0) --days;
  // 1970-01-01 was a Thursday (index 3 with Monday = 0).
  std::int64_t w = (days + 3) % 7;
  if (w < 0) w += 7;
  return static_cast<int>(w);
}

long HourlyCalendar::day_start(long t) const {
  return t - (hour_of_day(t) - 1);
}

HourlyCalendar HourlyCalendar::slice(long from, long to) const {
  if (from < 0 || to > length_ || from >= to) {
    throw RangeError("calendar slice [" + std::to_string(from) + ", " + std::to_string(to) +
                     ") out of range for length " + std::to_string(length_));
  }
  return HourlyCalendar(time_of(from), to - from);
}

}  // namespace epf
