#include "epf/metrics.hpp"

#include <cmath>

#include "epf/errors.hpp"

namespace epf {

MetricReport compute_metrics(const std::vector<double>& forecast,
                             const std::vector<double>& realized, const HourlyCalendar& calendar,
                             long start_index) {
  if (forecast.empty()) throw EmptyError("no forecasts to score");
  if (forecast.size() != realized.size()) {
    throw PairError("forecast and realized lengths differ");
  }
  const long n = static_cast<long>(forecast.size());
  if (start_index < 0 || start_index + n > calendar.length()) {
    throw RangeError("forecast span exceeds the calendar");
  }

  MetricReport report;
  report.n = n;
  for (long t = 0; t < n; ++t) {
    const double e = realized[t] - forecast[t];
    report.sse += e * e;
    report.sae += std::abs(e);
  }
  report.mae = report.sae / n;
  report.rmse = std::sqrt(report.sse / n);

  // First complete day: the first hour with hour_of_day == 1.
  long first_day = 0;
  while (first_day < n && calendar.hour_of_day(start_index + first_day) != 1) ++first_day;

  double drmse_sum = 0.0;
  for (long d = first_day; d + kHoursPerDay <= n; d += kHoursPerDay) {
    double sse = 0.0;
    for (long h = 0; h < kHoursPerDay; ++h) {
      const double e = realized[d + h] - forecast[d + h];
      sse += e * e;
    }
    drmse_sum += std::sqrt(sse / kHoursPerDay);
    ++report.complete_days;
  }
  report.avg_drmse = report.complete_days ? drmse_sum / report.complete_days : 0.0;
  report.excluded_day_hours = n - static_cast<long>(report.complete_days) * kHoursPerDay;

  double wrmse_sum = 0.0;
  for (long w = first_day; w + kHoursPerWeek <= n; w += kHoursPerWeek) {
    double sse = 0.0;
    for (long h = 0; h < kHoursPerWeek; ++h) {
      const double e = realized[w + h] - forecast[w + h];
      sse += e * e;
    }
    wrmse_sum += std::sqrt(sse / kHoursPerWeek);
    ++report.complete_weeks;
  }
  report.avg_wrmse = report.complete_weeks ? wrmse_sum / report.complete_weeks : 0.0;
  report.excluded_week_hours = n - static_cast<long>(report.complete_weeks) * kHoursPerWeek;
  return report;
}

DmResult diebold_mariano(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                         int horizon) {
  if (errors_a.size() != errors_b.size()) throw PairError("error series lengths differ");
  const long n = static_cast<long>(errors_a.size());
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (n < kHoursPerWeek) {
    throw RangeError("Diebold-Mariano needs at least 168 paired errors, got " +
                     std::to_string(n));
  }

  DmResult result;
  result.horizon = horizon;
  result.bandwidth = horizon - 1;
  result.n = n;

  std::vector<double> d(n);
  bool all_zero = true;
  for (long t = 0; t < n; ++t) {
    d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    if (d[t] != 0.0) all_zero = false;
  }
  if (all_zero) {
    result.degenerate = true;
    return result;  // statistic 0, p 1
  }

  double mean = 0.0;
  for (const double v : d) mean += v;
  mean /= n;

  // Bartlett-kernel long-run variance over horizon-1 lags.
  double lrv = 0.0;
  for (int lag = 0; lag <= result.bandwidth; ++lag) {
    double gamma = 0.0;
    for (long t = lag; t < n; ++t) gamma += (d[t] - mean) * (d[t - lag] - mean);
    gamma /= n;
    const double weight = 1.0 - static_cast<double>(lag) / horizon;
    lrv += (lag == 0) ? gamma : 2.0 * weight * gamma;
  }
  if (lrv <= 0.0) {
    result.degenerate = true;
    return result;
  }

  const double dm = mean / std::sqrt(lrv / n);
  const double h = static_cast<double>(horizon);
  const double harvey =
      std::sqrt((n + 1.0 - 2.0 * h + h * (h - 1.0) / n) / static_cast<double>(n));
  result.statistic = dm * harvey;
  result.p_value = 0.5 * std::erfc(result.statistic / std::sqrt(2.0));
  return result;
}

const char* significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

}  // namespace epf
