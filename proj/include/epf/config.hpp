#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epf/forecaster.hpp"
#include "epf/panel.hpp"
#include "epf/sensitivity.hpp"
#include "epf/synth.hpp"

namespace epf {

// Parsed key/value file with [section] headers; '#' and ';' start comments.
class IniFile {
 public:
  static IniFile load(const std::string& path);
  static IniFile parse(const std::string& text, const std::string& origin = "<memory>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections() const;
  const std::map<std::string, std::string>& section(const std::string& name) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::string origin_;
};

// One declarative run: data source, model roster with per-model overrides,
// windows, evaluation span, cadence, seed and output location.
struct RunConfig {
  std::uint64_t seed = 0;  // mandatory in the file; no wall-clock seeding
  std::string output_dir = "out";
  int jobs = 1;
  int retune_every_days = 7;

  std::string source;  // "csv" or "synth"
  std::string csv_path;
  IngestSchema schema;
  SynthConfig synth;

  long training_hours = 672;
  long subset_hours = 504;

  int eval_days = 7;
  std::string eval_start = "auto";  // or an ISO timestamp in the panel

  std::vector<std::string> roster;      // preset names; see preset_spec
  std::vector<std::string> externals;   // Panel-B predictor columns
  std::map<std::string, std::map<std::string, std::string>> model_overrides;

  std::vector<SensitivityGroup> sensitivity_groups;
  std::vector<std::string> sensitivity_models;  // empty = roster minus naive
};

RunConfig load_run_config(const std::string& path);

// Roster presets: naive, dlr, arma11, armapq, ridge, lasso, svr, pcr, rf,
// blm, ensemble. with_externals selects the Panel-B variant (arma presets
// then report as ARMAX). Overrides from [model.<preset>] are applied last.
ForecasterSpec preset_spec(const RunConfig& cfg, const std::string& preset, bool with_externals);

// The panel from the configured source (ingestion or generation).
HourlyPanel load_panel(const RunConfig& cfg);

// First hour index of the evaluation span.
long resolve_eval_start(const RunConfig& cfg, const HourlyPanel& panel);

}  // namespace epf
