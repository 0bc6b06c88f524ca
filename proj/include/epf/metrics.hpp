#pragma once

#include <vector>

#include "epf/time.hpp"

namespace epf {

struct MetricReport {
  double mae = 0.0;
  double rmse = 0.0;
  double avg_drmse = 0.0;  // mean RMSE over complete 24-hour days
  double avg_wrmse = 0.0;  // mean RMSE over complete 168-hour weeks
  // Exact accumulators backing the headline numbers: rmse == sqrt(sse / n).
  double sse = 0.0;
  double sae = 0.0;
  long n = 0;
  int complete_days = 0;
  int complete_weeks = 0;
  long excluded_day_hours = 0;   // hours outside any complete day
  long excluded_week_hours = 0;  // hours outside any complete week
};

// MAE/RMSE over all hours; DRMSE per complete calendar-aligned day and WRMSE
// per complete 168-hour block (weeks count from the first complete day),
// each averaged. Incomplete trailing blocks are excluded and counted.
// Accumulation is plain left-to-right summation so the accumulators are
// reproducible exactly. start_index locates forecast[0] on the calendar.
MetricReport compute_metrics(const std::vector<double>& forecast,
                             const std::vector<double>& realized, const HourlyCalendar& calendar,
                             long start_index);

struct DmResult {
  double statistic = 0.0;  // positive => the second model is more accurate
  double p_value = 1.0;    // one-sided
  int horizon = 24;
  int bandwidth = 23;  // Bartlett lags in the HAC variance
  bool degenerate = false;
  long n = 0;
};

// Modified Diebold-Mariano test for a 24-hour forecast horizon: squared-error
// loss differential d_t = e_a^2 - e_b^2, HAC variance with Bartlett weights
// over horizon-1 lags, Harvey small-sample factor, one-sided normal p-value.
DmResult diebold_mariano(const std::vector<double>& errors_a, const std::vector<double>& errors_b,
                         int horizon = 24);

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
const char* significance_stars(double p_value);

}  // namespace epf
