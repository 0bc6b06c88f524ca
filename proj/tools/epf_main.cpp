#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "epf/backtest.hpp"
#include "epf/config.hpp"
#include "epf/csv.hpp"
#include "epf/errors.hpp"
#include "epf/metrics.hpp"
#include "epf/sensitivity.hpp"
#include "epf/synth.hpp"

namespace fs = std::filesystem;
using namespace epf;

namespace {

constexpr const char* kVersion = "1.0.0";

struct CommonArgs {
  std::string config_path;
  std::string out_override;
  int jobs_override = -1;
  long seed_override = -1;
};

fs::path resolve_output_dir(const RunConfig& cfg, const CommonArgs& args) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("EPF_OUTPUT_DIR")) dir = env;
  if (!args.out_override.empty()) dir = args.out_override;
  fs::create_directories(dir);
  return dir;
}

RunConfig load_with_overrides(const CommonArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (args.jobs_override > 0) cfg.jobs = args.jobs_override;
  if (args.seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(args.seed_override);
    cfg.synth.seed = cfg.seed;
  }
  return cfg;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  return out;
}

// Roster for `evaluate`: Panel A (no externals, naive included), then Panel B
// (externals, naive has no twin), mirroring the headline comparison layout.
std::vector<ForecasterSpec> evaluation_roster(const RunConfig& cfg) {
  std::vector<ForecasterSpec> specs;
  for (const auto& preset : cfg.roster) specs.push_back(preset_spec(cfg, preset, false));
  if (!cfg.externals.empty()) {
    for (const auto& preset : cfg.roster) {
      if (preset != "naive") specs.push_back(preset_spec(cfg, preset, true));
    }
  }
  return specs;
}

BacktestPlan evaluation_plan(const RunConfig& cfg, const HourlyPanel& panel) {
  BacktestPlan plan;
  plan.training_window_hours = cfg.training_hours;
  plan.subset_hours = cfg.subset_hours;
  plan.retune_every_days = cfg.retune_every_days;
  plan.seed = cfg.seed;
  plan.jobs = cfg.jobs;
  plan.eval_day_starts = make_eval_days(resolve_eval_start(cfg, panel), cfg.eval_days);
  plan.models = evaluation_roster(cfg);
  return plan;
}

void write_forecasts_csv(const HourlyPanel& panel, const BacktestResult& result,
                         const fs::path& path) {
  auto out = open_out(path);
  out << "timestamp,model,forecast,realized\n";
  for (const auto& run : result.models) {
    for (std::size_t i = 0; i < run.forecasts.size(); ++i) {
      const long t = result.eval_day_starts.front() + static_cast<long>(i);
      out << format_timestamp(panel.calendar.time_of(t)) << ',' << run.label << ','
          << format_double(run.forecasts[i]) << ',' << format_double(run.realized[i]) << '\n';
    }
  }
}

void write_metrics_csv(const BacktestResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "panel,model,RMSE,MAE,Avg. DRMSE,Avg. WRMSE\n";
  for (const auto& run : result.models) {
    const bool ext = run.label.size() > 4 && run.label.rfind("_ext") == run.label.size() - 4;
    const std::string base = run.label.substr(0, run.label.rfind('_'));
    out << (ext ? 'B' : 'A') << ',' << base << ',' << format_fixed(run.metrics.rmse, 2) << ','
        << format_fixed(run.metrics.mae, 2) << ',' << format_fixed(run.metrics.avg_drmse, 2)
        << ',' << format_fixed(run.metrics.avg_wrmse, 2) << '\n';
  }
}

std::vector<double> run_errors(const ModelRun& run) {
  std::vector<double> e(run.forecasts.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = run.realized[i] - run.forecasts[i];
  return e;
}

void write_dm_matrix_csv(const BacktestResult& result, const fs::path& path) {
  auto out = open_out(path);
  out << "model_with_externals,benchmark_without,statistic,p_value,stars\n";
  if (!result.models.empty() && result.models.front().forecasts.size() < 168) {
    out << "# evaluation span shorter than 168 hours; the 24-hour-horizon test is undefined\n";
    return;
  }
  for (const auto& model : result.models) {
    if (model.label.rfind("_ext") != model.label.size() - 4) continue;
    const auto errors_model = run_errors(model);
    for (const auto& bench : result.models) {
      if (bench.label.rfind("_noext") == std::string::npos) continue;
      const auto errors_bench = run_errors(bench);
      // Positive statistic: the second series (the model with externals) is
      // the more accurate one.
      const DmResult dm = diebold_mariano(errors_bench, errors_model);
      out << model.label << ',' << bench.label << ',' << format_fixed(dm.statistic, 4) << ','
          << format_fixed(dm.p_value, 4) << ',' << significance_stars(dm.p_value) << '\n';
    }
  }
}

void write_manifest(const RunConfig& cfg, const HourlyPanel& panel, const BacktestResult& result,
                    const fs::path& path) {
  auto out = open_out(path);
  out << "engine_version = " << kVersion << '\n'
      << "seed = " << cfg.seed << '\n'
      << "source = " << cfg.source << '\n'
      << "market_label = " << panel.market_label << '\n'
      << "training_hours = " << cfg.training_hours << '\n'
      << "subset_hours = " << cfg.subset_hours << '\n'
      << "retune_every_days = " << cfg.retune_every_days << '\n'
      << "eval_days = " << cfg.eval_days << '\n'
      << "eval_start = "
      << format_timestamp(panel.calendar.time_of(result.eval_day_starts.front())) << '\n';
  out << "models =";
  for (const auto& run : result.models) out << ' ' << run.label;
  out << '\n';
  out << "externals =";
  for (const auto& e : cfg.externals) out << ' ' << e;
  out << '\n';
  for (const auto& run : result.models) {
    out << "fallback_days." << run.label << " = " << run.fallback_days << '\n';
  }
}

void dump_models(const HourlyPanel& panel, const BacktestPlan& plan, const fs::path& dir) {
  // Serialized state of each model refit on the last evaluation day's window.
  const long day_start = plan.eval_day_starts.back();
  for (const auto& spec : plan.models) {
    const Rng rng = Rng(plan.seed).derive("dump").derive(spec.label());
    const auto fitted =
        fit_forecaster(panel, spec, {day_start - plan.training_window_hours, day_start}, rng);
    auto out = open_out(dir / ("model_" + spec.label() + ".txt"));
    fitted->serialize(out);
  }
}

int cmd_ingest(const CommonArgs& args, int ffill_limit) {
  RunConfig cfg = load_with_overrides(args);
  if (cfg.source != "csv") throw ConfigError("ingest requires a csv data source");
  if (ffill_limit >= 0) cfg.schema.ffill_limit = ffill_limit;
  const HourlyPanel panel = ingest_csv(cfg.csv_path, cfg.schema);
  const fs::path dir = resolve_output_dir(cfg, args);
  write_csv(panel, (dir / "panel.csv").string());

  auto out = open_out(dir / "summary.csv");
  out << "# " << kSummaryConventions << '\n';
  out << "column,mean,median,min,max,std_dev,skewness,kurtosis\n";
  for (const auto& s : summarize(panel)) {
    out << s.column << ',' << format_fixed(s.mean, 2) << ',' << format_fixed(s.median, 2) << ','
        << format_fixed(s.min, 2) << ',' << format_fixed(s.max, 2) << ','
        << format_fixed(s.std_dev, 2) << ','
        << (s.skewness ? format_fixed(*s.skewness, 2) : "undefined") << ','
        << (s.kurtosis ? format_fixed(*s.kurtosis, 2) : "undefined") << '\n';
  }
  std::cout << "ingested " << panel.length() << " hours into " << (dir / "panel.csv").string()
            << "\n";
  return 0;
}

int cmd_synth(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const auto [panel, truth] = generate(cfg.synth);
  const fs::path dir = resolve_output_dir(cfg, args);
  write_csv(panel, (dir / "synth_panel.csv").string());
  write_ground_truth(truth, (dir / "ground_truth.txt").string());
  std::cout << "generated " << panel.length() << " hours into "
            << (dir / "synth_panel.csv").string() << "\n";
  return 0;
}

int cmd_tune(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const HourlyPanel panel = load_panel(cfg);
  const fs::path dir = resolve_output_dir(cfg, args);
  const long eval_start = resolve_eval_start(cfg, panel);
  const TrainWindow window{eval_start - cfg.training_hours, eval_start};
  int written = 0;
  for (const auto& spec : evaluation_roster(cfg)) {
    TuningResult result;
    const Rng rng = Rng(cfg.seed).derive("tune-cmd").derive(spec.label());
    tune_spec(panel, spec, window, cfg.subset_hours, rng, &result);
    if (result.combinations.empty()) continue;  // nothing tunable for this kind
    write_tuning_csv(result, (dir / ("tuning_" + spec.label() + ".csv")).string());
    ++written;
    std::cout << spec.label() << ": best";
    for (std::size_t a = 0; a < result.axis_names.size(); ++a) {
      std::cout << ' ' << result.axis_names[a] << " = " << format_double(result.best()[a]);
    }
    std::cout << " (mean RMSE " << format_fixed(result.mean_scores[result.best_index], 4)
              << ")\n";
  }
  std::cout << written << " score tables written to " << dir.string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args, bool dump) {
  const RunConfig cfg = load_with_overrides(args);
  const HourlyPanel panel = load_panel(cfg);
  const BacktestPlan plan = evaluation_plan(cfg, panel);
  const BacktestResult result = run_backtest(panel, plan);

  const fs::path dir = resolve_output_dir(cfg, args);
  write_forecasts_csv(panel, result, dir / "forecasts.csv");
  write_metrics_csv(result, dir / "metrics.csv");
  if (!cfg.externals.empty()) write_dm_matrix_csv(result, dir / "dm_matrix.csv");
  write_manifest(cfg, panel, result, dir / "manifest.txt");
  if (dump) dump_models(panel, plan, dir);

  for (const auto& run : result.models) {
    std::cout << run.label << ": RMSE " << format_fixed(run.metrics.rmse, 2) << "  MAE "
              << format_fixed(run.metrics.mae, 2) << "  Avg. DRMSE "
              << format_fixed(run.metrics.avg_drmse, 2) << "  Avg. WRMSE "
              << format_fixed(run.metrics.avg_wrmse, 2);
    if (run.fallback_days > 0) std::cout << "  [" << run.fallback_days << " naive-fallback days]";
    std::cout << "\n";
  }
  return 0;
}

int cmd_sensitivity(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  if (cfg.sensitivity_groups.empty()) {
    throw ConfigError("[sensitivity] groups is empty; nothing to rank");
  }
  const HourlyPanel panel = load_panel(cfg);
  BacktestPlan plan = evaluation_plan(cfg, panel);

  // Sensitivity runs on the with-externals roster (there is nothing to remove
  // otherwise); an explicit [sensitivity] models list narrows it.
  std::vector<ForecasterSpec> specs;
  const auto& presets = cfg.sensitivity_models.empty() ? cfg.roster : cfg.sensitivity_models;
  for (const auto& preset : presets) {
    if (preset == "naive") continue;
    specs.push_back(preset_spec(cfg, preset, true));
  }
  plan.models = std::move(specs);

  const SensitivityReport report = run_sensitivity(panel, plan, cfg.sensitivity_groups);
  const fs::path dir = resolve_output_dir(cfg, args);
  write_sensitivity_csv(report, (dir / "sensitivity.csv").string());

  for (const int g : report.ranking) {
    std::cout << report.groups[g] << ": fused S = " << format_fixed(report.fused[g], 4)
              << "  scaled " << format_fixed(report.scaled[g], 1) << "%\n";
  }
  return 0;
}

struct DmArgs {
  std::string file_a, file_b, model_a, model_b, out_path;
  int horizon = 24;
};

std::pair<std::vector<std::string>, std::vector<double>> load_forecast_errors(
    const std::string& path, const std::string& model) {
  const CsvTable table = read_csv(path);
  const long ts = table.column("timestamp");
  const long fc = table.column("forecast");
  const long rl = table.column("realized");
  if (ts < 0 || fc < 0 || rl < 0) {
    throw SchemaError(path + " must have timestamp, forecast and realized columns");
  }
  const long mc = table.column("model");
  std::vector<std::string> stamps;
  std::vector<double> errors;
  bool model_seen = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (mc >= 0 && !model.empty() && row[mc] != model) continue;
    if (mc >= 0 && model.empty()) {
      // A model column without a filter is only unambiguous for single-model files.
      if (r > 0 && row[mc] != table.rows[0][mc]) {
        throw PairError(path + " holds multiple models; pass --model-a/--model-b");
      }
    }
    model_seen = true;
    stamps.push_back(row[ts]);
    errors.push_back(parse_double(row[rl], static_cast<long>(r) + 1, "realized") -
                     parse_double(row[fc], static_cast<long>(r) + 1, "forecast"));
  }
  if (!model_seen) {
    throw PairError(path + " has no rows" + (model.empty() ? "" : " for model '" + model + "'"));
  }
  return {std::move(stamps), std::move(errors)};
}

int cmd_dm(const DmArgs& args) {
  auto [stamps_a, errors_a] = load_forecast_errors(args.file_a, args.model_a);
  auto [stamps_b, errors_b] = load_forecast_errors(args.file_b, args.model_b);
  if (stamps_a.size() != stamps_b.size()) {
    throw PairError("forecast files differ in length (" + std::to_string(stamps_a.size()) +
                    " vs " + std::to_string(stamps_b.size()) + ")");
  }
  for (std::size_t i = 0; i < stamps_a.size(); ++i) {
    if (stamps_a[i] != stamps_b[i]) {
      throw PairError("timestamp mismatch at row " + std::to_string(i + 1) + ": " + stamps_a[i] +
                      " vs " + stamps_b[i]);
    }
  }
  const DmResult dm = diebold_mariano(errors_a, errors_b, args.horizon);
  std::cout << "dm_statistic = " << format_fixed(dm.statistic, 4) << '\n'
            << "p_value = " << format_fixed(dm.p_value, 4) << '\n'
            << "stars = " << significance_stars(dm.p_value) << '\n'
            << "n = " << dm.n << "  horizon = " << dm.horizon << "  bandwidth = " << dm.bandwidth
            << (dm.degenerate ? "  (degenerate: identical losses)" : "") << '\n';
  if (!args.out_path.empty()) {
    auto out = open_out(args.out_path);
    out << "statistic,p_value,stars,n,horizon,degenerate\n"
        << format_fixed(dm.statistic, 4) << ',' << format_fixed(dm.p_value, 4) << ','
        << significance_stars(dm.p_value) << ',' << dm.n << ',' << dm.horizon << ','
        << (dm.degenerate ? 1 : 0) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead electricity price forecasting engine"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs common;
  DmArgs dm_args;
  bool dump = false;
  int ffill_limit = -1;

  const auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* opt = cmd->add_option("-c,--config", common.config_path, "run configuration file");
    if (needs_config) opt->required();
    cmd->add_option("-o,--out", common.out_override, "output directory override");
    cmd->add_option("-j,--jobs", common.jobs_override, "worker threads");
    cmd->add_option("-s,--seed", common.seed_override, "seed override");
  };

  auto* ingest_cmd =
      app.add_subcommand("ingest", "ingest a CSV panel and write its canonical form");
  add_common(ingest_cmd);
  ingest_cmd->add_option("--ffill-limit", ffill_limit,
                         "max consecutive missing hourly cells to forward-fill");
  add_common(app.add_subcommand("synth", "generate a synthetic market panel"));
  add_common(app.add_subcommand("tune", "run time-series cross-validation and export score tables"));
  auto* eval_cmd =
      app.add_subcommand("evaluate", "rolling backtest with metrics and DM comparisons");
  add_common(eval_cmd);
  eval_cmd->add_flag("--dump-models", dump, "serialize each model refit on the last day");
  add_common(app.add_subcommand("sensitivity", "leave-one-group-out predictor ranking"));

  auto* dm_cmd = app.add_subcommand("dm", "Diebold-Mariano test on two forecast files");
  dm_cmd->add_option("--a", dm_args.file_a, "first forecast csv")->required();
  dm_cmd->add_option("--b", dm_args.file_b, "second forecast csv")->required();
  dm_cmd->add_option("--model-a", dm_args.model_a, "model filter for the first file");
  dm_cmd->add_option("--model-b", dm_args.model_b, "model filter for the second file");
  dm_cmd->add_option("--horizon", dm_args.horizon, "forecast horizon (default 24)");
  dm_cmd->add_option("-o,--out", dm_args.out_path, "also write the result as csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("ingest")) return cmd_ingest(common);
    if (app.got_subcommand("synth")) return cmd_synth(common);
    if (app.got_subcommand("tune")) return cmd_tune(common);
    if (app.got_subcommand("evaluate")) return cmd_evaluate(common, dump);
    if (app.got_subcommand("sensitivity")) return cmd_sensitivity(common);
    if (app.got_subcommand("dm")) return cmd_dm(dm_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const PlanError& e) {
    std::cerr << "plan error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
