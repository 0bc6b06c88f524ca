#pragma once

#include <cstdint>
#include <string>

namespace epf {

// Seconds since the Unix epoch, always UTC and hour-aligned.
using UnixTime = std::int64_t;

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr int kHoursPerDay = 24;
constexpr int kHoursPerWeek = 168;

// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (also accepts a space separator).
// Throws ParseError on malformed input or non-UTC offsets.
UnixTime parse_timestamp(const std::string& s);

// Canonical form "YYYY-MM-DDTHH:00:00Z".
std::string format_timestamp(UnixTime t);

// Hour-indexed calendar over [start, start + length hours). start must be
// hour-aligned; consecutive indices are exactly 3600 s apart.
class HourlyCalendar {
 public:
  HourlyCalendar(UnixTime start, long length);

  UnixTime start() const { return start_; }
  long length() const { return length_; }
  UnixTime time_of(long t) const { return start_ + t * kSecondsPerHour; }

  // Hour of day in 1..24 (hour 1 covers 00:00-01:00 UTC).
  int hour_of_day(long t) const;
  // 0 = Monday ... 6 = Sunday.
  int weekday_of(long t) const;
  bool is_saturday(long t) const { return weekday_of(t) == 5; }
  bool is_sunday(long t) const { return weekday_of(t) == 6; }

  // Index of the first hour (hour_of_day == 1) of the day containing t.
  long day_start(long t) const;

  HourlyCalendar slice(long from, long to) const;

 private:
  UnixTime start_;
  long length_;
};

}  // namespace epf
