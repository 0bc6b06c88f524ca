#include "epf/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epf/csv.hpp"
#include "epf/errors.hpp"

namespace epf {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = s.find(sep, begin);
    if (pos == std::string::npos) {
      const auto piece = trim(s.substr(begin));
      if (!piece.empty()) out.push_back(piece);
      break;
    }
    const auto piece = trim(s.substr(begin, pos - begin));
    if (!piece.empty()) out.push_back(piece);
    begin = pos + 1;
  }
  return out;
}

}  // namespace

IniFile IniFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile ini;
  ini.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      ini.data_[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    ini.data_[section][key] = value;
  }
  return ini;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string IniFile::require(const std::string& section, const std::string& key) const {
  if (!has(section, key)) {
    throw ConfigError(origin_ + ": missing required key '" + key + "' in section [" + section +
                      "]");
  }
  return get(section, key, "");
}

long IniFile::get_long(const std::string& section, const std::string& key, long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not an integer: '" + v + "'");
  }
  return out;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not a number: '" + v + "'");
  }
  return out;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' in [" + section + "] is not a boolean: '" + v + "'");
}

std::vector<std::string> IniFile::get_list(const std::string& section,
                                           const std::string& key) const {
  return split(get(section, key, ""), ',');
}

std::vector<std::string> IniFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

const std::map<std::string, std::string>& IniFile::section(const std::string& name) const {
  static const std::map<std::string, std::string> empty;
  const auto s = data_.find(name);
  return s == data_.end() ? empty : s->second;
}

namespace {

void load_synth_section(const IniFile& ini, SynthConfig& synth) {
  synth.horizon_hours = ini.get_long("synth", "horizon_hours", synth.horizon_hours);
  if (ini.has("synth", "start")) {
    synth.start = parse_timestamp(ini.require("synth", "start"));
  }
  synth.base_price = ini.get_double("synth", "base_price", synth.base_price);
  synth.daily_amplitude = ini.get_double("synth", "daily_amplitude", synth.daily_amplitude);
  synth.weekly_amplitude = ini.get_double("synth", "weekly_amplitude", synth.weekly_amplitude);
  synth.ar_phi = ini.get_double("synth", "ar_phi", synth.ar_phi);
  synth.ar_sigma = ini.get_double("synth", "ar_sigma", synth.ar_sigma);
  synth.spike_prob = ini.get_double("synth", "spike_prob", synth.spike_prob);
  synth.spike_mean = ini.get_double("synth", "spike_mean", synth.spike_mean);
  synth.spike_sd = ini.get_double("synth", "spike_sd", synth.spike_sd);
  synth.nonlinear_load = ini.get_double("synth", "nonlinear_load", synth.nonlinear_load);
  synth.predictors = default_predictor_roster();
  // Per-predictor overrides: [synth.<name>] with mean / sd / phi / coefficient.
  for (auto& gen : synth.predictors) {
    const std::string section = "synth." + gen.name;
    gen.mean = ini.get_double(section, "mean", gen.mean);
    gen.sd = ini.get_double(section, "sd", gen.sd);
    gen.phi = ini.get_double(section, "phi", gen.phi);
    gen.coefficient = ini.get_double(section, "coefficient", gen.coefficient);
  }
}

std::vector<SensitivityGroup> parse_groups(const std::string& text) {
  // name:member,member; name:member; ...
  std::vector<SensitivityGroup> groups;
  for (const auto& part : split(text, ';')) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("sensitivity group '" + part + "' must look like name:col1,col2");
    }
    SensitivityGroup g;
    g.name = trim(part.substr(0, colon));
    g.members = split(part.substr(colon + 1), ',');
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const IniFile ini = IniFile::load(path);
  RunConfig cfg;

  if (!ini.has("run", "seed")) {
    throw ConfigError(path + ": [run] seed is mandatory (the engine never seeds from the clock)");
  }
  cfg.seed = static_cast<std::uint64_t>(ini.get_long("run", "seed", 0));
  cfg.output_dir = ini.get("run", "output_dir", cfg.output_dir);
  cfg.jobs = static_cast<int>(ini.get_long("run", "jobs", cfg.jobs));
  cfg.retune_every_days =
      static_cast<int>(ini.get_long("run", "retune_every_days", cfg.retune_every_days));

  cfg.source = ini.get("data", "source", "synth");
  if (cfg.source != "csv" && cfg.source != "synth") {
    throw ConfigError("data source must be 'csv' or 'synth', got '" + cfg.source + "'");
  }
  cfg.csv_path = ini.get("data", "csv_path", "");
  if (cfg.source == "csv") {
    if (cfg.csv_path.empty()) {
      throw ConfigError("[data] csv_path is required for the csv source");
    }
    if (!std::filesystem::exists(cfg.csv_path)) {
      throw ConfigError("[data] csv_path does not exist: " + cfg.csv_path);
    }
  }
  cfg.schema.timestamp_column = ini.get("data", "timestamp_column", cfg.schema.timestamp_column);
  cfg.schema.price_column = ini.get("data", "price_column", cfg.schema.price_column);
  cfg.schema.daily_columns = ini.get_list("data", "daily_columns");
  cfg.schema.ffill_limit = static_cast<int>(ini.get_long("data", "ffill_limit", 0));
  cfg.schema.market_label = ini.get("data", "market_label", cfg.schema.market_label);

  load_synth_section(ini, cfg.synth);
  cfg.synth.seed = cfg.seed;

  cfg.training_hours = ini.get_long("windows", "training_hours", cfg.training_hours);
  cfg.subset_hours = ini.get_long("windows", "subset_hours", cfg.subset_hours);

  cfg.eval_days = static_cast<int>(ini.get_long("evaluate", "eval_days", cfg.eval_days));
  cfg.eval_start = ini.get("evaluate", "eval_start", cfg.eval_start);
  cfg.roster = ini.get_list("evaluate", "models");
  if (cfg.roster.empty()) {
    cfg.roster = {"naive", "dlr", "arma11", "armapq", "ridge", "lasso",
                  "svr",   "pcr", "rf",     "blm",    "ensemble"};
  }
  cfg.externals = ini.get_list("evaluate", "externals");
  if (cfg.externals.empty() && cfg.source == "synth") {
    for (const auto& gen : default_predictor_roster()) cfg.externals.push_back(gen.name);
  }

  for (const auto& name : ini.sections()) {
    if (name.rfind("model.", 0) == 0) {
      cfg.model_overrides[name.substr(6)] = ini.section(name);
    }
  }

  if (ini.has("sensitivity", "groups")) {
    cfg.sensitivity_groups = parse_groups(ini.require("sensitivity", "groups"));
  }
  cfg.sensitivity_models = ini.get_list("sensitivity", "models");
  return cfg;
}

namespace {

double override_double(const std::map<std::string, std::string>& kv, const std::string& key,
                       double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  return parse_double(it->second, 0, key);
}

long override_long(const std::map<std::string, std::string>& kv, const std::string& key,
                   long fallback) {
  return static_cast<long>(override_double(kv, key, static_cast<double>(fallback)));
}

std::vector<double> override_grid(const std::map<std::string, std::string>& kv,
                                  const std::string& key, std::vector<double> fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::vector<double> out;
  for (const auto& piece : split(it->second, ',')) out.push_back(parse_double(piece, 0, key));
  if (out.empty()) throw ConfigError("empty grid for '" + key + "'");
  return out;
}

}  // namespace

ForecasterSpec preset_spec(const RunConfig& cfg, const std::string& preset, bool with_externals) {
  ModelKind kind;
  bool aicc = false;
  if (preset == "naive") {
    kind = ModelKind::Naive;
  } else if (preset == "dlr") {
    kind = ModelKind::Dlr;
  } else if (preset == "arma11") {
    kind = with_externals ? ModelKind::SeasonalArmax : ModelKind::SeasonalArma;
  } else if (preset == "armapq") {
    kind = with_externals ? ModelKind::SeasonalArmax : ModelKind::SeasonalArma;
    aicc = true;
  } else if (preset == "ridge" || preset == "lasso" || preset == "svr" || preset == "pcr" ||
             preset == "rf" || preset == "blm" || preset == "ensemble") {
    kind = kind_from_name(preset);
  } else {
    throw ConfigError("unknown model preset '" + preset + "'");
  }

  ForecasterSpec spec =
      make_default_spec(kind, with_externals ? cfg.externals : std::vector<std::string>{});
  spec.name = preset + (with_externals ? "_ext" : "_noext");
  spec.arma.select_by_aicc = aicc;
  if (preset == "arma11") spec.arma = ArmaOrder{1, 1, false, {}};
  spec.ensemble_subset_hours = cfg.subset_hours;

  const auto ov = cfg.model_overrides.find(preset);
  if (ov != cfg.model_overrides.end()) {
    const auto& kv = ov->second;
    spec.penalty.lambda = override_double(kv, "lambda", spec.penalty.lambda);
    spec.penalty.grid_length =
        static_cast<int>(override_long(kv, "grid_length", spec.penalty.grid_length));
    spec.svr.c = override_double(kv, "C", spec.svr.c);
    spec.svr.epsilon = override_double(kv, "epsilon", spec.svr.epsilon);
    spec.svr.c_grid = override_grid(kv, "C_grid", spec.svr.c_grid);
    spec.rf.n_trees = static_cast<int>(override_long(kv, "n_trees", spec.rf.n_trees));
    spec.rf.min_node_size =
        static_cast<int>(override_long(kv, "min_node_size", spec.rf.min_node_size));
    spec.rf.m_try = static_cast<int>(override_long(kv, "m_try", spec.rf.m_try));
    spec.pcr.k = static_cast<int>(override_long(kv, "k", spec.pcr.k));
    spec.blm.m_stop = static_cast<int>(override_long(kv, "m_stop", spec.blm.m_stop));
    spec.blm.nu = override_double(kv, "nu", spec.blm.nu);
    {
      const auto grid = override_grid(kv, "m_stop_grid", {});
      if (!grid.empty()) {
        spec.blm.m_stop_grid.clear();
        for (const double v : grid) spec.blm.m_stop_grid.push_back(static_cast<int>(v));
      }
    }
    spec.arma.p = static_cast<int>(override_long(kv, "p", spec.arma.p));
    spec.arma.q = static_cast<int>(override_long(kv, "q", spec.arma.q));
    if (kv.count("all_hour_dummies")) {
      spec.features.all_hour_dummies = kv.at("all_hour_dummies") == "true";
    }
  }

  if (kind == ModelKind::Ensemble) {
    std::vector<std::string> member_presets;
    if (ov != cfg.model_overrides.end() && ov->second.count("members")) {
      member_presets = split(ov->second.at("members"), ',');
    } else {
      for (const auto& other : cfg.roster) {
        if (other != "naive" && other != "ensemble") member_presets.push_back(other);
      }
    }
    for (const auto& mp : member_presets) {
      spec.ensemble_members.push_back(preset_spec(cfg, mp, with_externals));
    }
  }
  return spec;
}

HourlyPanel load_panel(const RunConfig& cfg) {
  if (cfg.source == "csv") return ingest_csv(cfg.csv_path, cfg.schema);
  return generate(cfg.synth).first;
}

long resolve_eval_start(const RunConfig& cfg, const HourlyPanel& panel) {
  const long warmup = cfg.training_hours + kHoursPerWeek;
  if (cfg.eval_start == "auto") {
    for (long t = warmup; t < panel.length(); ++t) {
      if (panel.calendar.hour_of_day(t) == 1) return t;
    }
    throw PlanError("panel too short for any evaluation day");
  }
  const UnixTime ts = parse_timestamp(cfg.eval_start);
  const long idx = (ts - panel.calendar.start()) / kSecondsPerHour;
  if (idx < 0 || idx >= panel.length()) {
    throw PlanError("eval_start " + cfg.eval_start + " lies outside the panel");
  }
  return idx;
}

}  // namespace epf
