#include "epf/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "epf/csv.hpp"
#include "epf/errors.hpp"
#include "epf/jobs.hpp"
#include "epf/linear_models.hpp"

namespace epf {

void BacktestPlan::validate(const HourlyPanel& panel) const {
  if (models.empty()) throw PlanError("no models in the backtest plan");
  if (eval_day_starts.empty()) throw PlanError("no evaluation days");
  if (training_window_hours < 1) throw PlanError("training window must be positive");
  if (retune_every_days < 1) throw PlanError("retune cadence must be >= 1 day");
  const long warmup = training_window_hours + kHoursPerWeek;
  for (std::size_t i = 0; i < eval_day_starts.size(); ++i) {
    const long day = eval_day_starts[i];
    if (day < warmup) {
      throw PlanError("evaluation day at hour " + std::to_string(day) + " needs " +
                      std::to_string(warmup) + " hours of preceding data");
    }
    if (day + kHoursPerDay > panel.length()) {
      throw PlanError("evaluation day at hour " + std::to_string(day) + " exceeds the panel");
    }
    if (panel.calendar.hour_of_day(day) != 1) {
      throw PlanError("evaluation day at hour " + std::to_string(day) +
                      " is not aligned to a day boundary");
    }
    if (i > 0 && day != eval_day_starts[i - 1] + kHoursPerDay) {
      throw PlanError("evaluation days must be consecutive");
    }
  }
  std::vector<std::string> labels;
  for (const auto& spec : models) {
    spec.validate();
    labels.push_back(spec.label());
  }
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw PlanError("duplicate model labels in the roster");
  }
}

std::vector<long> make_eval_days(long first_day_start, int days) {
  std::vector<long> out(days);
  for (int i = 0; i < days; ++i) out[i] = first_day_start + static_cast<long>(i) * kHoursPerDay;
  return out;
}

const ModelRun& BacktestResult::run(const std::string& label) const {
  for (const auto& m : models) {
    if (m.label == label) return m;
  }
  throw SchemaError("no backtest run labeled '" + label + "'");
}

namespace {

std::uint64_t combo_key(const std::vector<double>& combo) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const double v : combo) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

bool is_tunable(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ridge:
    case ModelKind::Lasso:
    case ModelKind::Svr:
    case ModelKind::Pcr:
    case ModelKind::RandomForest:
    case ModelKind::Blm:
      return true;
    default:
      return false;  // ARMA order selection runs inside the fit (AICc)
  }
}

void apply_combo(ForecasterSpec& spec, const std::vector<std::string>& axes,
                 const std::vector<double>& combo) {
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const double v = combo[a];
    if (axes[a] == "lambda") {
      spec.penalty.lambda = v;
    } else if (axes[a] == "C") {
      spec.svr.c = v;
    } else if (axes[a] == "m_try") {
      spec.rf.m_try = static_cast<int>(v);
    } else if (axes[a] == "k") {
      spec.pcr.k = static_cast<int>(v);
    } else if (axes[a] == "m_stop") {
      spec.blm.m_stop = static_cast<int>(v);
    } else {
      throw ConfigError("unknown tuning axis '" + axes[a] + "'");
    }
  }
}

double fold_rmse(const HourlyPanel& panel, const ForecasterSpec& spec, const Fold& fold,
                 Rng rng) {
  const auto fitted = fit_forecaster(panel, spec, {fold.train_begin, fold.train_end}, rng);
  const auto forecast = fitted->forecast_day(panel, fold.valid_begin);
  double sse = 0.0;
  for (int h = 0; h < 24; ++h) {
    const double e = panel.price[fold.valid_begin + h] - forecast[h];
    sse += e * e;
  }
  return std::sqrt(sse / 24.0);
}

}  // namespace

ForecasterSpec tune_spec(const HourlyPanel& panel, const ForecasterSpec& spec, TrainWindow window,
                         long subset_hours, Rng rng, TuningResult* result_out) {
  if (!is_tunable(spec.kind)) return spec;

  std::vector<GridAxis> axes;
  switch (spec.kind) {
    case ModelKind::Ridge:
    case ModelKind::Lasso: {
      FeatureMatrix m = build_features(panel, spec.features, window.begin, window.end);
      if (spec.features.standardize) m = standardize_fit_transform(std::move(m));
      const double lmax = lasso_lambda_max(m.x, m.y);
      axes.push_back({"lambda", lambda_grid(lmax, spec.penalty.grid_length)});
      break;
    }
    case ModelKind::Svr: {
      axes.push_back({"C", spec.svr.c_grid});
      break;
    }
    case ModelKind::RandomForest: {
      const FeatureMatrix m = build_features(panel, spec.features, window.begin, window.begin + 2);
      std::vector<double> grid;
      for (const int v : rf_m_try_grid(static_cast<int>(m.cols()))) grid.push_back(v);
      axes.push_back({"m_try", grid});
      break;
    }
    case ModelKind::Pcr: {
      const FeatureMatrix m = build_features(panel, spec.features, window.begin, window.begin + 2);
      std::vector<double> grid;
      for (long k = 1; k <= m.cols(); ++k) grid.push_back(static_cast<double>(k));
      axes.push_back({"k", grid});
      break;
    }
    case ModelKind::Blm: {
      std::vector<double> grid;
      for (const int v : spec.blm.m_stop_grid) grid.push_back(v);
      axes.push_back({"m_stop", grid});
      break;
    }
    default:
      return spec;
  }

  std::vector<std::string> axis_names;
  for (const auto& a : axes) axis_names.push_back(a.name);

  const auto folds = make_folds(window.begin, window.end, subset_hours);
  const TuningResult result =
      tune(axes, folds, [&](const std::vector<double>& combo, const Fold& fold) {
        ForecasterSpec candidate = spec;
        apply_combo(candidate, axis_names, combo);
        return fold_rmse(panel, candidate, fold,
                         rng.derive(combo_key(combo)).derive(static_cast<std::uint64_t>(
                             fold.train_begin)));
      });

  ForecasterSpec tuned = spec;
  apply_combo(tuned, result.axis_names, result.best());
  if (result_out) *result_out = result;
  return tuned;
}

namespace {

// The member spec a standalone run would be using on the given day: its base
// spec with the latest tuning event at or before that day applied.
ForecasterSpec tuned_spec_in_force(const ModelRun& run, long day_start) {
  ForecasterSpec spec = run.base_spec;
  const TuneEvent* latest = nullptr;
  for (const auto& ev : run.tuning) {
    if (ev.day_start <= day_start) latest = &ev;
  }
  if (latest) {
    apply_combo(spec, latest->result.axis_names, latest->result.best());
  }
  return spec;
}

ModelRun run_one_model(const HourlyPanel& panel, const BacktestPlan& plan,
                       const ForecasterSpec& spec,
                       const std::vector<const ModelRun*>& finished_runs) {
  ModelRun run;
  run.label = spec.label();
  run.base_spec = spec;
  const Rng model_rng = Rng(plan.seed).derive("backtest").derive(spec.label());

  ForecasterSpec naive_spec = make_default_spec(ModelKind::Naive);

  ForecasterSpec current = spec;
  for (std::size_t di = 0; di < plan.eval_day_starts.size(); ++di) {
    const long day_start = plan.eval_day_starts[di];
    const TrainWindow window{day_start - plan.training_window_hours, day_start};

    if (di % static_cast<std::size_t>(plan.retune_every_days) == 0) {
      if (is_tunable(spec.kind)) {
        TuneEvent event;
        event.day_start = day_start;
        try {
          current = tune_spec(panel, spec, window, plan.subset_hours,
                              model_rng.derive("tune").derive(di), &event.result);
          run.tuning.push_back(std::move(event));
        } catch (const std::exception& e) {
          current = spec;
          run.flags.push_back("tuning failed at day " + std::to_string(di) + ": " + e.what());
        }
      } else if (spec.kind == ModelKind::Ensemble) {
        // Refresh member specs with the tuned state of the matching
        // standalone runs, when present in the roster.
        for (auto& member : current.ensemble_members) {
          for (const ModelRun* other : finished_runs) {
            if (other->label == member.label()) {
              member = tuned_spec_in_force(*other, day_start);
              break;
            }
          }
        }
      }
    }

    std::array<double, 24> forecast{};
    try {
      const auto fitted =
          fit_forecaster(panel, current, window, model_rng.derive("fit").derive(di));
      forecast = fitted->forecast_day(panel, day_start);
      for (const auto& f : fitted->flags()) {
        if (run.flags.size() < 200) run.flags.push_back(f);
      }
    } catch (const std::exception& e) {
      // Fallback keeps the forecast series complete so DM pairs stay aligned.
      const auto naive =
          fit_forecaster(panel, naive_spec, window, model_rng.derive("naive").derive(di));
      forecast = naive->forecast_day(panel, day_start);
      ++run.fallback_days;
      run.flags.push_back("day " + std::to_string(di) + " fell back to naive: " + e.what());
    }
    for (int h = 0; h < 24; ++h) {
      run.forecasts.push_back(forecast[h]);
      run.realized.push_back(panel.price[day_start + h]);
    }
    run.train_windows.emplace_back(window.begin, window.end);
  }

  run.metrics =
      compute_metrics(run.forecasts, run.realized, panel.calendar, plan.eval_day_starts.front());
  double mean_realized = 0.0;
  for (const double v : run.realized) mean_realized += v;
  mean_realized /= static_cast<double>(run.realized.size());
  double sst = 0.0;
  for (const double v : run.realized) sst += (v - mean_realized) * (v - mean_realized);
  run.r_squared = sst > 0 ? 1.0 - run.metrics.sse / sst : 0.0;
  return run;
}

}  // namespace

BacktestResult run_backtest(const HourlyPanel& panel, const BacktestPlan& plan) {
  plan.validate(panel);

  BacktestResult result;
  result.eval_day_starts = plan.eval_day_starts;
  result.models.resize(plan.models.size());

  // Ensembles run after the standalone models so they can reuse the tuned
  // member state; both phases parallelize over models with index-addressed
  // results, so the merge order is the roster order for any job count.
  std::vector<long> plain, ensembles;
  for (std::size_t i = 0; i < plan.models.size(); ++i) {
    (plan.models[i].kind == ModelKind::Ensemble ? ensembles : plain).push_back(
        static_cast<long>(i));
  }

  parallel_for(plan.jobs, static_cast<long>(plain.size()), [&](long idx) {
    const long i = plain[idx];
    result.models[i] = run_one_model(panel, plan, plan.models[i], {});
  });

  std::vector<const ModelRun*> finished;
  for (const long i : plain) finished.push_back(&result.models[i]);

  parallel_for(plan.jobs, static_cast<long>(ensembles.size()), [&](long idx) {
    const long i = ensembles[idx];
    result.models[i] = run_one_model(panel, plan, plan.models[i], finished);
  });

  return result;
}

void write_tuning_csv(const TuningResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (const auto& name : result.axis_names) out << name << ',';
  out << "mean_score";
  const std::size_t fold_count =
      result.per_fold_scores.empty() ? 0 : result.per_fold_scores[0].size();
  for (std::size_t j = 0; j < fold_count; ++j) out << ",fold" << j;
  out << '\n';
  for (std::size_t c = 0; c < result.combinations.size(); ++c) {
    for (const double v : result.combinations[c]) out << format_double(v) << ',';
    out << format_double(result.mean_scores[c]);
    for (const double s : result.per_fold_scores[c]) out << ',' << format_double(s);
    out << '\n';
  }
}

}  // namespace epf
