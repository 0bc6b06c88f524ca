#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epf/time.hpp"

namespace epf {

enum class Frequency { Hourly, Daily };

struct PredictorColumn {
  std::string name;
  Frequency freq = Frequency::Hourly;
  std::vector<double> values;
};

// Calendar-aligned hourly panel: price plus named predictor columns, all of
// equal length with no missing entries. Immutable after construction; safe to
// share across threads by reference.
struct HourlyPanel {
  HourlyCalendar calendar;
  std::vector<double> price;
  std::vector<PredictorColumn> predictors;
  std::string market_label;

  long length() const { return calendar.length(); }
  const PredictorColumn* find_predictor(const std::string& name) const;
  // Throws SchemaError when absent.
  const PredictorColumn& predictor(const std::string& name) const;
  std::vector<std::string> predictor_names() const;

  void validate() const;  // length agreement, unique names, daily constancy
};

struct IngestSchema {
  std::string timestamp_column = "timestamp";
  std::string price_column = "price";
  std::vector<std::string> daily_columns;  // remaining columns are hourly
  int ffill_limit = 0;  // max consecutive missing hourly cells to forward-fill
  std::string market_label = "day-ahead";
};

// Reads an hourly CSV (header: timestamp, price, predictors), sorts rows by
// time, verifies the hourly grid, and aligns daily columns by repeating each
// day's value across its 24 hours (weekend gaps carry the last value forward).
HourlyPanel ingest_csv(const std::string& path, const IngestSchema& schema);

// Canonical CSV form; ingest_csv(write_csv(p)) reproduces p bit-exactly.
void write_csv(const HourlyPanel& panel, const std::string& path);

// Contiguous sub-panel [from, to), calendar preserved. Throws RangeError.
HourlyPanel slice(const HourlyPanel& panel, long from, long to);

struct SummaryStats {
  std::string column;
  double mean = 0, median = 0, min = 0, max = 0, std_dev = 0;
  // Absent for constant columns instead of leaking NaN.
  std::optional<double> skewness;  // sample g1 = m3 / m2^(3/2)
  std::optional<double> kurtosis;  // plain m4 / m2^2 (normal = 3)
};

// Convention note emitted in summary headers.
inline constexpr const char* kSummaryConventions =
    "std_dev: sample (n-1); skewness: g1 = m3/m2^1.5; kurtosis: plain m4/m2^2 (normal = 3)";

// One record per column (price first). Requires length >= 2.
std::vector<SummaryStats> summarize(const HourlyPanel& panel);

}  // namespace epf
