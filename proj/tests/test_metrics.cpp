#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "epf/errors.hpp"
#include "epf/metrics.hpp"
#include "epf/rng.hpp"

using namespace epf;

TEST_CASE("hand-computed MAE and RMSE") {
  // calendar starting at midnight; three hours only
  HourlyCalendar cal(0, 400);
  const std::vector<double> realized{1.0, 2.0, 3.0};
  const std::vector<double> forecast{2.0, 2.0, 2.0};
  const MetricReport r = compute_metrics(forecast, realized, cal, 0);
  CHECK(r.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(r.complete_days == 0);
  CHECK(r.excluded_day_hours == 3);
}

TEST_CASE("perfect forecasts zero every metric") {
  HourlyCalendar cal(0, 400);
  const std::vector<double> v(336, 5.0);
  const MetricReport r = compute_metrics(v, v, cal, 0);
  CHECK(r.mae == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.avg_drmse == 0.0);
  CHECK(r.avg_wrmse == 0.0);
  CHECK(r.complete_days == 14);
  CHECK(r.complete_weeks == 2);
}

TEST_CASE("a single complete day: DRMSE equals that day's RMSE") {
  HourlyCalendar cal(0, 100);
  Rng rng(31);
  std::vector<double> realized(24), forecast(24);
  for (int h = 0; h < 24; ++h) {
    realized[h] = rng.normal(40.0, 5.0);
    forecast[h] = realized[h] + rng.normal();
  }
  const MetricReport r = compute_metrics(forecast, realized, cal, 0);
  CHECK(r.complete_days == 1);
  CHECK(r.avg_drmse == doctest::Approx(r.rmse).epsilon(1e-15));
  CHECK(r.complete_weeks == 0);
  CHECK(r.excluded_week_hours == 24);
}

TEST_CASE("two-week fixture reproduces hand-derived values to 1e-12") {
  // day k carries |error| = (k+1)/4, sign alternating by hour
  HourlyCalendar cal(0, 336);
  std::vector<double> realized(336, 50.0), forecast(336);
  for (int k = 0; k < 14; ++k) {
    for (int h = 0; h < 24; ++h) {
      const double e = (k + 1) * 0.25 * (h % 2 == 0 ? 1.0 : -1.0);
      forecast[k * 24 + h] = realized[k * 24 + h] - e;
    }
  }
  const MetricReport r = compute_metrics(forecast, realized, cal, 0);
  CHECK(std::abs(r.mae - 1.875) <= 1e-12);
  CHECK(std::abs(r.rmse - std::sqrt(4.53125)) <= 1e-12);
  CHECK(std::abs(r.avg_drmse - 1.875) <= 1e-12);
  CHECK(std::abs(r.avg_wrmse - 0.5 * (std::sqrt(1.25) + std::sqrt(7.8125))) <= 1e-12);
  CHECK(r.complete_days == 14);
  CHECK(r.complete_weeks == 2);
}

TEST_CASE("the accumulator backs the headline number exactly") {
  HourlyCalendar cal(0, 700);
  Rng rng(32);
  std::vector<double> realized(500), forecast(500);
  for (int i = 0; i < 500; ++i) {
    realized[i] = rng.normal(40, 10);
    forecast[i] = rng.normal(40, 10);
  }
  const MetricReport r = compute_metrics(forecast, realized, cal, 0);
  double sse = 0.0, sae = 0.0;  // same left-to-right order
  for (int i = 0; i < 500; ++i) {
    const double e = realized[i] - forecast[i];
    sse += e * e;
    sae += std::abs(e);
  }
  CHECK(r.sse == sse);
  CHECK(r.sae == sae);
  CHECK(r.rmse == std::sqrt(r.sse / 500));
  CHECK(r.mae == r.sae / 500);
}

TEST_CASE("shuffling hours within one day leaves that day's DRMSE unchanged") {
  HourlyCalendar cal(0, 100);
  Rng rng(33);
  std::vector<double> realized(48), forecast(48);
  for (int i = 0; i < 48; ++i) {
    realized[i] = rng.normal(40, 10);
    forecast[i] = rng.normal(40, 10);
  }
  const MetricReport base = compute_metrics(forecast, realized, cal, 0);

  // permute day 2's hours with the same permutation on both series
  std::vector<int> perm(24);
  for (int i = 0; i < 24; ++i) perm[i] = 24 + (i * 7) % 24;
  auto realized_p = realized;
  auto forecast_p = forecast;
  for (int i = 0; i < 24; ++i) {
    realized_p[24 + i] = realized[perm[i]];
    forecast_p[24 + i] = forecast[perm[i]];
  }
  const MetricReport shuffled = compute_metrics(forecast_p, realized_p, cal, 0);
  CHECK(shuffled.avg_drmse == doctest::Approx(base.avg_drmse).epsilon(1e-15));
}

TEST_CASE("metrics input validation") {
  HourlyCalendar cal(0, 100);
  CHECK_THROWS_AS(compute_metrics({}, {}, cal, 0), EmptyError);
  CHECK_THROWS_AS(compute_metrics({1.0}, {1.0, 2.0}, cal, 0), PairError);
  CHECK_THROWS_AS(compute_metrics(std::vector<double>(200, 0.0), std::vector<double>(200, 0.0),
                                  cal, 0),
                  RangeError);
}

TEST_CASE("DM: identical errors degenerate to statistic 0, p = 1") {
  std::vector<double> e(200, 1.5);
  const DmResult r = diebold_mariano(e, e);
  CHECK(r.degenerate);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK(significance_stars(r.p_value) == std::string(""));
}

TEST_CASE("DM: strict dominance gives a large positive statistic") {
  Rng rng(34);
  std::vector<double> errors_a(1000), errors_b(1000, 0.0);
  for (auto& e : errors_a) e = rng.normal();
  const DmResult r = diebold_mariano(errors_a, errors_b);
  CHECK(r.statistic > 3.0);
  CHECK(r.p_value < 0.001);
  CHECK(significance_stars(r.p_value) == std::string("***"));
}

TEST_CASE("DM antisymmetry: swapping the series flips the sign exactly") {
  Rng rng(35);
  std::vector<double> a(500), b(500);
  for (int i = 0; i < 500; ++i) {
    a[i] = rng.normal(0, 1.2);
    b[i] = rng.normal(0, 1.0);
  }
  const DmResult ab = diebold_mariano(a, b);
  const DmResult ba = diebold_mariano(b, a);
  CHECK(ab.statistic == -ba.statistic);
}

TEST_CASE("DM preconditions and stars") {
  std::vector<double> shorty(100, 1.0);
  CHECK_THROWS_AS(diebold_mariano(shorty, shorty), RangeError);
  std::vector<double> a(200, 1.0), b(199, 1.0);
  CHECK_THROWS_AS(diebold_mariano(a, b), PairError);

  CHECK(significance_stars(0.0005) == std::string("***"));
  CHECK(significance_stars(0.005) == std::string("**"));
  CHECK(significance_stars(0.03) == std::string("*"));
  CHECK(significance_stars(0.2) == std::string(""));
}

TEST_CASE("DM size is near nominal under the null (reduced replication count)") {
  int rejections = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(4000 + rep);
    std::vector<double> a(2000), b(2000);
    for (int i = 0; i < 2000; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    const DmResult r = diebold_mariano(a, b);
    if (r.p_value < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / reps;
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.09);
}
