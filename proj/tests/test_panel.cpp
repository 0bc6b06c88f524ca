#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "epf/errors.hpp"
#include "epf/panel.hpp"
#include "epf/rng.hpp"

using namespace epf;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

// 48 hourly rows from 2010-01-04 (a Monday) with one daily fuel column.
std::string two_day_csv() {
  std::string csv = "timestamp,price,fuel\n";
  for (int d = 0; d < 2; ++d) {
    for (int h = 0; h < 24; ++h) {
      char line[96];
      std::snprintf(line, sizeof(line), "2010-01-%02dT%02d:00:00Z,%d,%s\n", 4 + d, h,
                    100 + d * 24 + h, h == 0 ? (d == 0 ? "90" : "92") : "");
      csv += line;
    }
  }
  return csv;
}

}  // namespace

TEST_CASE("timestamps parse and format round-trip") {
  const UnixTime t = parse_timestamp("2010-01-04T05:00:00Z");
  CHECK(format_timestamp(t) == "2010-01-04T05:00:00Z");
  CHECK(parse_timestamp("2010-01-04 05:00") == t);
  CHECK_THROWS_AS(parse_timestamp("2010-13-04T05:00:00Z"), ParseError);
  CHECK_THROWS_AS(parse_timestamp("04.01.2010 05:00"), ParseError);
  CHECK_THROWS_AS(parse_timestamp("2010-01-04T05:00:00+01:00"), ParseError);
}

TEST_CASE("calendar cycles") {
  // 2010-01-04 00:00 UTC was a Monday.
  HourlyCalendar cal(parse_timestamp("2010-01-04T00:00:00Z"), 24 * 14);
  CHECK(cal.hour_of_day(0) == 1);
  CHECK(cal.hour_of_day(23) == 24);
  CHECK(cal.hour_of_day(24) == 1);
  CHECK(cal.weekday_of(0) == 0);
  CHECK(cal.is_saturday(5 * 24));
  CHECK(cal.is_sunday(6 * 24));
  CHECK(cal.weekday_of(7 * 24) == 0);
  CHECK(cal.day_start(30) == 24);
  for (long t = 1; t < cal.length(); ++t) {
    CHECK(cal.time_of(t) - cal.time_of(t - 1) == 3600);
  }
}

TEST_CASE("ingest aligns a daily column by forward-fill over each day") {
  const auto path = temp_path("epf_two_day.csv");
  write_file(path, two_day_csv());
  IngestSchema schema;
  schema.daily_columns = {"fuel"};
  const HourlyPanel panel = ingest_csv(path, schema);
  REQUIRE(panel.length() == 48);
  const auto& fuel = panel.predictor("fuel");
  CHECK(fuel.freq == Frequency::Daily);
  for (int h = 0; h < 24; ++h) {
    CHECK(fuel.values[h] == 90.0);
    CHECK(fuel.values[24 + h] == 92.0);
  }
  CHECK(panel.price[0] == 100.0);
  CHECK(panel.price[47] == 147.0);
}

TEST_CASE("ingest rejects gaps, duplicates and junk cells") {
  IngestSchema schema;
  const auto path = temp_path("epf_bad.csv");

  write_file(path,
             "timestamp,price\n2010-01-01T00:00:00Z,1\n2010-01-01T01:00:00Z,2\n"
             "2010-01-01T03:00:00Z,3\n");
  CHECK_THROWS_WITH_AS(ingest_csv(path, schema), doctest::Contains("2010-01-01T02:00:00Z"),
                       GapError);

  write_file(path, "timestamp,price\n2010-01-01T00:00:00Z,1\n2010-01-01T00:00:00Z,2\n");
  CHECK_THROWS_AS(ingest_csv(path, schema), DuplicateError);

  write_file(path, "timestamp,price\n2010-01-01T00:00:00Z,1\n2010-01-01T01:00:00Z,oops\n");
  CHECK_THROWS_WITH_AS(ingest_csv(path, schema), doctest::Contains("row 2"), ParseError);

  write_file(path, "timestamp,price\n2010-01-01T00:00:00Z,1\n2010-01-01T01:00:00Z,\n");
  CHECK_THROWS_AS(ingest_csv(path, schema), ParseError);
  schema.ffill_limit = 1;
  const HourlyPanel filled = ingest_csv(path, schema);
  CHECK(filled.price[1] == 1.0);
}

TEST_CASE("rows are sorted by time on ingestion") {
  const auto path = temp_path("epf_shuffled.csv");
  write_file(path,
             "timestamp,price\n2010-01-01T02:00:00Z,3\n2010-01-01T00:00:00Z,1\n"
             "2010-01-01T01:00:00Z,2\n");
  const HourlyPanel panel = ingest_csv(path, IngestSchema{});
  CHECK(panel.price == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("write then ingest reproduces the panel bit-exactly") {
  const auto path = temp_path("epf_roundtrip.csv");
  write_file(path, two_day_csv());
  IngestSchema schema;
  schema.daily_columns = {"fuel"};
  HourlyPanel panel = ingest_csv(path, schema);
  // Awkward values that need shortest-round-trip formatting.
  Rng rng(7);
  for (auto& v : panel.price) v = v + rng.normal() * 1e-7 + 0.1;

  const auto out_path = temp_path("epf_roundtrip_out.csv");
  write_csv(panel, out_path);
  const HourlyPanel again = ingest_csv(out_path, schema);
  REQUIRE(again.length() == panel.length());
  for (long t = 0; t < panel.length(); ++t) {
    CHECK(again.price[t] == panel.price[t]);
    CHECK(again.predictors[0].values[t] == panel.predictors[0].values[t]);
  }
  CHECK(again.calendar.start() == panel.calendar.start());
}

TEST_CASE("slice preserves alignment and rejects bad ranges") {
  const auto path = temp_path("epf_slice.csv");
  write_file(path, two_day_csv());
  IngestSchema schema;
  schema.daily_columns = {"fuel"};
  const HourlyPanel panel = ingest_csv(path, schema);
  const HourlyPanel same = slice(panel, 0, panel.length());
  CHECK(same.price == panel.price);

  const HourlyPanel day2 = slice(panel, 24, 48);
  CHECK(day2.length() == 24);
  CHECK(day2.calendar.time_of(0) == panel.calendar.time_of(24));
  CHECK(day2.price[0] == panel.price[24]);

  CHECK_THROWS_AS(slice(panel, 10, 5), RangeError);
  CHECK_THROWS_AS(slice(panel, 0, 100), RangeError);
}

TEST_CASE("summary statistics") {
  HourlyPanel panel{HourlyCalendar(0, 4), {1.0, 1.0, 1.0, 1.0}, {}, "t"};
  panel.predictors.push_back({"x", Frequency::Hourly, {-1.0, 1.0, -1.0, 1.0}});

  const auto stats = summarize(panel);
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].column == "price");
  CHECK(stats[0].mean == 1.0);
  CHECK(stats[0].std_dev == 0.0);
  CHECK(!stats[0].skewness.has_value());  // constant column: undefined, not NaN
  CHECK(!stats[0].kurtosis.has_value());

  CHECK(stats[1].mean == 0.0);
  CHECK(stats[1].median == 0.0);
  CHECK(stats[1].min == -1.0);
  CHECK(stats[1].max == 1.0);
  // sample std of {-1, 1, -1, 1} = sqrt(4/3)
  CHECK(stats[1].std_dev == doctest::Approx(std::sqrt(4.0 / 3.0)));
  CHECK(*stats[1].skewness == doctest::Approx(0.0));
  CHECK(*stats[1].kurtosis == doctest::Approx(1.0));

  HourlyPanel tiny{HourlyCalendar(0, 1), {1.0}, {}, "t"};
  CHECK_THROWS_AS(summarize(tiny), EmptyError);

  // [-1, 1]: sample std sqrt(2) per the hand computation
  HourlyPanel pair{HourlyCalendar(0, 2), {-1.0, 1.0}, {}, "t"};
  CHECK(summarize(pair)[0].std_dev == doctest::Approx(std::sqrt(2.0)));
}
