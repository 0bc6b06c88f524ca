#include "epf/synth.hpp"

#include <cmath>
#include <fstream>

#include "epf/csv.hpp"
#include "epf/errors.hpp"
#include "epf/rng.hpp"

namespace epf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<PredictorGen> default_predictor_roster() {
  return {
      {"wind", Frequency::Hourly, 20623.0, 9000.0, 0.75, -4.0e-4},
      {"solar", Frequency::Hourly, 30000.0, 0.5, 0.8, -3.0e-4},
      {"load", Frequency::Hourly, 55003.0, 8000.0, 0.90, 1.2e-3},
      {"coal", Frequency::Daily, 92.89, 10.0, 0.98, 0.05},
      {"gas", Frequency::Daily, 22.59, 3.0, 0.98, 0.15},
      {"oil", Frequency::Daily, 102.08, 10.0, 0.98, 0.02},
      {"fx", Frequency::Daily, 1.33, 0.05, 0.99, 2.0},
  };
}

void SynthConfig::validate() const {
  if (horizon_hours < 2 * kHoursPerWeek) {
    throw ConfigError("synthetic horizon must cover at least 2 weeks");
  }
  if (start % 86400 != 0) throw ConfigError("synthetic start must be midnight-aligned UTC");
  if (!(ar_phi > -1.0 && ar_phi < 1.0)) throw ConfigError("ar_phi must lie in (-1, 1)");
  if (ar_sigma < 0) throw ConfigError("ar_sigma must be >= 0");
  if (!(spike_prob >= 0.0 && spike_prob < 1.0)) throw ConfigError("spike_prob must be in [0, 1)");
  if (solar_night_start < 1 || solar_night_start > 24 || solar_night_end < 0 ||
      solar_night_end >= solar_night_start) {
    throw ConfigError("solar night hours must satisfy 0 <= end < start <= 24");
  }
  for (const auto& p : predictors) {
    if (!(p.phi > -1.0 && p.phi < 1.0)) {
      throw ConfigError("predictor '" + p.name + "' phi must lie in (-1, 1)");
    }
    if (!std::isfinite(p.coefficient)) {
      throw ConfigError("predictor '" + p.name + "' coefficient must be finite");
    }
    if (p.sd < 0) throw ConfigError("predictor '" + p.name + "' sd must be >= 0");
  }
}

namespace {

// Stationary AR(1) deviations with the given stationary sd.
std::vector<double> ar1_series(long n, double phi, double sd, Rng& rng) {
  std::vector<double> out(n);
  if (n == 0) return out;
  const double innov = sd * std::sqrt(std::max(1.0 - phi * phi, 0.0));
  out[0] = rng.normal(0.0, sd);
  for (long t = 1; t < n; ++t) out[t] = phi * out[t - 1] + rng.normal(0.0, innov);
  return out;
}

}  // namespace

std::pair<HourlyPanel, GroundTruth> generate(const SynthConfig& cfg_in) {
  SynthConfig cfg = cfg_in;
  if (cfg.predictors.empty()) cfg.predictors = default_predictor_roster();
  cfg.validate();

  const long n = cfg.horizon_hours;
  const long n_days = (n + kHoursPerDay - 1) / kHoursPerDay;
  Rng rng(cfg.seed);

  HourlyPanel panel{HourlyCalendar(cfg.start, n), {}, {}, "synthetic"};
  panel.price.resize(n);

  for (const auto& gen : cfg.predictors) {
    Rng stream = rng.derive("predictor").derive(gen.name);
    PredictorColumn col{gen.name, gen.freq, std::vector<double>(n)};
    if (gen.freq == Frequency::Daily) {
      const auto dev = ar1_series(n_days, gen.phi, gen.sd, stream);
      for (long t = 0; t < n; ++t) col.values[t] = gen.mean + dev[t / kHoursPerDay];
    } else if (gen.name == "solar") {
      // Bell-shaped daylight profile, exactly zero during the night hours.
      const auto noise = ar1_series(n, gen.phi, 1.0, stream);
      const double span = cfg.solar_night_start - cfg.solar_night_end;
      for (long t = 0; t < n; ++t) {
        const int h = panel.calendar.hour_of_day(t);
        if (h >= cfg.solar_night_start || h <= cfg.solar_night_end) {
          col.values[t] = 0.0;
        } else {
          const double profile = std::sin(kTwoPi / 2.0 * (h - cfg.solar_night_end) / span);
          col.values[t] = gen.mean * profile * std::max(0.0, 1.0 + gen.sd * noise[t]);
        }
      }
    } else {
      const auto dev = ar1_series(n, gen.phi, gen.sd, stream);
      for (long t = 0; t < n; ++t) col.values[t] = gen.mean + dev[t];
    }
    panel.predictors.push_back(std::move(col));
  }

  // Planted effects use centered predictors so the configured base stays the
  // mean price.
  std::vector<double> col_means(panel.predictors.size(), 0.0);
  for (std::size_t c = 0; c < panel.predictors.size(); ++c) {
    double sum = 0.0;
    for (const double v : panel.predictors[c].values) sum += v;
    col_means[c] = sum / n;
  }

  Rng noise_rng = rng.derive("price-noise");
  Rng spike_rng = rng.derive("spikes");
  const double stationary_sd =
      cfg.ar_sigma / std::sqrt(std::max(1.0 - cfg.ar_phi * cfg.ar_phi, 1e-12));
  double eta = noise_rng.normal(0.0, cfg.ar_sigma > 0 ? stationary_sd : 0.0);

  const PredictorColumn* load_col = panel.find_predictor("load");
  const double load_mean = load_col ? col_means[load_col - panel.predictors.data()] : 0.0;
  double load_sd = 1.0;
  if (load_col && cfg.nonlinear_load != 0.0) {
    double ss = 0.0;
    for (const double v : load_col->values) ss += (v - load_mean) * (v - load_mean);
    load_sd = std::sqrt(ss / n);
  }

  for (long t = 0; t < n; ++t) {
    const int hod = panel.calendar.hour_of_day(t);
    const long how = panel.calendar.weekday_of(t) * 24 + (hod - 1);  // hour of week
    double price = cfg.base_price;
    price += cfg.daily_amplitude * std::sin(kTwoPi * (hod - 1) / 24.0 - 2.0);
    price += cfg.weekly_amplitude * std::sin(kTwoPi * how / 168.0 - 1.0);
    for (std::size_t c = 0; c < panel.predictors.size(); ++c) {
      price += cfg.predictors[c].coefficient * (panel.predictors[c].values[t] - col_means[c]);
    }
    if (cfg.nonlinear_load != 0.0 && load_col) {
      const double z = (load_col->values[t] - load_mean) / load_sd;
      price += cfg.nonlinear_load * std::max(0.0, z) * z;
    }
    price += eta;
    eta = cfg.ar_phi * eta + noise_rng.normal(0.0, cfg.ar_sigma);
    if (cfg.spike_prob > 0 && spike_rng.uniform() < cfg.spike_prob) {
      const double sign = spike_rng.uniform() < 0.5 ? -1.0 : 1.0;
      price += sign * (cfg.spike_mean + std::abs(spike_rng.normal(0.0, cfg.spike_sd)));
    }
    panel.price[t] = price;
  }

  GroundTruth truth;
  truth.base_price = cfg.base_price;
  truth.daily_amplitude = cfg.daily_amplitude;
  truth.weekly_amplitude = cfg.weekly_amplitude;
  truth.ar_phi = cfg.ar_phi;
  truth.ar_sigma = cfg.ar_sigma;
  truth.spike_prob = cfg.spike_prob;
  truth.nonlinear_load = cfg.nonlinear_load;
  for (const auto& gen : cfg.predictors) truth.coefficients[gen.name] = gen.coefficient;

  panel.validate();
  return {std::move(panel), std::move(truth)};
}

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << "base_price = " << format_double(truth.base_price) << '\n'
      << "daily_amplitude = " << format_double(truth.daily_amplitude) << '\n'
      << "weekly_amplitude = " << format_double(truth.weekly_amplitude) << '\n'
      << "ar_phi = " << format_double(truth.ar_phi) << '\n'
      << "ar_sigma = " << format_double(truth.ar_sigma) << '\n'
      << "spike_prob = " << format_double(truth.spike_prob) << '\n'
      << "nonlinear_load = " << format_double(truth.nonlinear_load) << '\n';
  for (const auto& [name, coeff] : truth.coefficients) {
    out << "coefficient." << name << " = " << format_double(coeff) << '\n';
  }
}

}  // namespace epf
