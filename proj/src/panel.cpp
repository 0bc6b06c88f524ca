#include "epf/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include "epf/csv.hpp"
#include "epf/errors.hpp"

namespace epf {

const PredictorColumn* HourlyPanel::find_predictor(const std::string& name) const {
  for (const auto& c : predictors) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const PredictorColumn& HourlyPanel::predictor(const std::string& name) const {
  const auto* c = find_predictor(name);
  if (!c) throw SchemaError("unknown predictor column: '" + name + "'");
  return *c;
}

std::vector<std::string> HourlyPanel::predictor_names() const {
  std::vector<std::string> names;
  names.reserve(predictors.size());
  for (const auto& c : predictors) names.push_back(c.name);
  return names;
}

void HourlyPanel::validate() const {
  const long t = length();
  if (static_cast<long>(price.size()) != t) {
    throw SchemaError("price column length does not match calendar");
  }
  std::set<std::string> seen;
  for (const auto& c : predictors) {
    if (static_cast<long>(c.values.size()) != t) {
      throw SchemaError("column '" + c.name + "' length does not match calendar");
    }
    if (!seen.insert(c.name).second) {
      throw SchemaError("duplicate predictor name: '" + c.name + "'");
    }
    if (c.freq == Frequency::Daily) {
      for (long i = 0; i < t; ++i) {
        const long ds = calendar.day_start(i);
        if (ds >= 0 && ds < t && c.values[i] != c.values[std::max(ds, 0L)]) {
          throw SchemaError("daily column '" + c.name + "' is not constant within day at hour " +
                            std::to_string(i));
        }
      }
    }
  }
}

HourlyPanel ingest_csv(const std::string& path, const IngestSchema& schema) {
  const CsvTable table = read_csv(path);

  const long ts_col = table.column(schema.timestamp_column);
  if (ts_col < 0) throw SchemaError("timestamp column '" + schema.timestamp_column + "' not found");
  const long price_col = table.column(schema.price_column);
  if (price_col < 0) throw SchemaError("price column '" + schema.price_column + "' not found");
  for (const auto& d : schema.daily_columns) {
    if (table.column(d) < 0) throw SchemaError("daily column '" + d + "' not found");
  }

  const long n = static_cast<long>(table.rows.size());
  if (n == 0) throw EmptyError("no data rows in " + path);

  // Sort row order by parsed timestamp, then verify the hourly grid.
  std::vector<std::pair<UnixTime, long>> order(n);
  for (long i = 0; i < n; ++i) {
    order[i] = {parse_timestamp(table.rows[i][ts_col]), i};
  }
  std::sort(order.begin(), order.end());
  for (long i = 1; i < n; ++i) {
    const UnixTime prev = order[i - 1].first, cur = order[i].first;
    if (cur == prev) {
      throw DuplicateError("duplicate timestamp " + format_timestamp(cur));
    }
    if (cur - prev != kSecondsPerHour) {
      throw GapError("missing hour " + format_timestamp(prev + kSecondsPerHour));
    }
  }
  if (order[0].first % kSecondsPerHour != 0) {
    throw ParseError("timestamps are not hour-aligned: " + format_timestamp(order[0].first));
  }

  HourlyPanel panel{HourlyCalendar(order[0].first, n), {}, {}, schema.market_label};
  panel.price.resize(n);

  const auto is_daily = [&](const std::string& name) {
    return std::find(schema.daily_columns.begin(), schema.daily_columns.end(), name) !=
           schema.daily_columns.end();
  };

  struct RawColumn {
    long index;
    PredictorColumn out;
  };
  std::vector<RawColumn> columns;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (static_cast<long>(c) == ts_col || static_cast<long>(c) == price_col) continue;
    RawColumn rc{static_cast<long>(c), {name, is_daily(name) ? Frequency::Daily : Frequency::Hourly, {}}};
    rc.out.values.resize(n);
    columns.push_back(std::move(rc));
  }

  const auto read_cell = [&](long row_sorted, long col, const std::string& name, Frequency freq,
                             std::vector<double>& dst, long& missing_run) {
    const long src = order[row_sorted].second;
    const std::string& cell = table.rows[src][col];
    if (cell.empty()) {
      if (row_sorted == 0) {
        throw ParseError("missing value at first hour of column '" + name + "'");
      }
      const long limit = (freq == Frequency::Daily)
                             ? std::numeric_limits<long>::max()  // daily sampling gaps are expected
                             : static_cast<long>(schema.ffill_limit);
      if (++missing_run > limit) {
        throw ParseError("missing value at row " + std::to_string(src + 1) + ", column '" + name +
                         "' (forward-fill limit " + std::to_string(schema.ffill_limit) + ")");
      }
      dst[row_sorted] = dst[row_sorted - 1];
      return;
    }
    missing_run = 0;
    dst[row_sorted] = parse_double(cell, src + 1, name);
  };

  long price_run = 0;
  std::vector<long> runs(columns.size(), 0);
  for (long i = 0; i < n; ++i) {
    read_cell(i, price_col, schema.price_column, Frequency::Hourly, panel.price, price_run);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      read_cell(i, columns[c].index, columns[c].out.name, columns[c].out.freq,
                columns[c].out.values, runs[c]);
    }
  }

  // Daily alignment: broadcast the value in force at each day's first hour.
  for (auto& rc : columns) {
    if (rc.out.freq != Frequency::Daily) continue;
    auto& v = rc.out.values;
    for (long i = 0; i < n; ++i) {
      const long ds = std::max(panel.calendar.day_start(i), 0L);
      v[i] = v[ds];
    }
  }

  for (auto& rc : columns) panel.predictors.push_back(std::move(rc.out));
  panel.validate();
  return panel;
}

void write_csv(const HourlyPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "timestamp,price";
  for (const auto& c : panel.predictors) out << ',' << c.name;
  out << '\n';
  for (long t = 0; t < panel.length(); ++t) {
    out << format_timestamp(panel.calendar.time_of(t)) << ',' << format_double(panel.price[t]);
    for (const auto& c : panel.predictors) out << ',' << format_double(c.values[t]);
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

HourlyPanel slice(const HourlyPanel& panel, long from, long to) {
  if (from < 0 || to > panel.length() || from >= to) {
    throw RangeError("panel slice [" + std::to_string(from) + ", " + std::to_string(to) +
                     ") out of range for length " + std::to_string(panel.length()));
  }
  HourlyPanel out{panel.calendar.slice(from, to),
                  {panel.price.begin() + from, panel.price.begin() + to},
                  {},
                  panel.market_label};
  for (const auto& c : panel.predictors) {
    out.predictors.push_back(
        {c.name, c.freq, {c.values.begin() + from, c.values.begin() + to}});
  }
  return out;
}

namespace {

SummaryStats column_stats(const std::string& name, const std::vector<double>& v) {
  const long n = static_cast<long>(v.size());
  SummaryStats s;
  s.column = name;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double m2 = 0, m3 = 0, m4 = 0;
  for (const double x : v) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.std_dev = std::sqrt(m2 * n / std::max<long>(n - 1, 1));
  if (m2 > 0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  return s;
}

}  // namespace

std::vector<SummaryStats> summarize(const HourlyPanel& panel) {
  if (panel.length() < 2) throw EmptyError("summarize requires at least 2 hours");
  std::vector<SummaryStats> out;
  out.push_back(column_stats("price", panel.price));
  for (const auto& c : panel.predictors) out.push_back(column_stats(c.name, c.values));
  return out;
}

}  // namespace epf
