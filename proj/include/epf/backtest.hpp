#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "epf/forecaster.hpp"
#include "epf/metrics.hpp"
#include "epf/panel.hpp"
#include "epf/tuner.hpp"

namespace epf {

// Daily rolling re-estimation: for every evaluation day each model is refit
// on the trailing training window ending at that day's first hour, then
// forecasts the day's 24 hours. Hyperparameters re-tune every
// retune_every_days evaluation days.
struct BacktestPlan {
  long training_window_hours = 672;
  long subset_hours = 504;  // tuning fold size d
  int retune_every_days = 7;
  std::vector<long> eval_day_starts;  // consecutive day-aligned hour indices
  std::vector<ForecasterSpec> models;
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate(const HourlyPanel& panel) const;
};

struct TuneEvent {
  long day_start = 0;
  TuningResult result;
};

struct ModelRun {
  std::string label;
  ForecasterSpec base_spec;
  std::vector<double> forecasts;  // 24 x eval days, chronological
  std::vector<double> realized;
  MetricReport metrics;
  double r_squared = 0.0;  // out-of-sample 1 - SSE/SST
  int fallback_days = 0;   // fit failures served by the naive fallback
  std::vector<std::string> flags;
  std::vector<TuneEvent> tuning;
  std::vector<std::pair<long, long>> train_windows;  // per day, for leakage checks
};

struct BacktestResult {
  std::vector<ModelRun> models;
  std::vector<long> eval_day_starts;

  const ModelRun& run(const std::string& label) const;  // SchemaError if absent
};

BacktestResult run_backtest(const HourlyPanel& panel, const BacktestPlan& plan);

// Grid search for one model on the window per Algorithm-1 folds. Models
// without tunable hyperparameters are returned unchanged (result untouched).
// Returns the spec with the winning combination applied.
ForecasterSpec tune_spec(const HourlyPanel& panel, const ForecasterSpec& spec, TrainWindow window,
                         long subset_hours, Rng rng, TuningResult* result_out = nullptr);

// Consecutive day starts for an evaluation span: first_day_start is the index
// of the first forecast hour.
std::vector<long> make_eval_days(long first_day_start, int days);

void write_tuning_csv(const TuningResult& result, const std::string& path);

}  // namespace epf
