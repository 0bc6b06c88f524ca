#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "epf/panel.hpp"

namespace epf {

struct PredictorGen {
  std::string name;
  Frequency freq = Frequency::Hourly;
  double mean = 0.0;
  double sd = 1.0;   // stationary sd of the AR(1) deviations; for the solar
                     // column this is the relative noise scale on the profile
  double phi = 0.8;  // AR(1) autocorrelation at the native frequency
  double coefficient = 0.0;  // planted effect on the price (per centered unit)
};

// EPEX-flavored synthetic market: deterministic seasonal sinusoids, planted
// linear predictor effects, AR(1) noise and rare two-sided spikes. The
// defaults are loosely calibrated to a mean of 43.32 EUR/MWh and a std dev
// near 16.66.
struct SynthConfig {
  long horizon_hours = 8760;
  UnixTime start = 1514764800;  // 2018-01-01T00:00:00Z, midnight-aligned
  double base_price = 43.32;
  double daily_amplitude = 7.0;
  double weekly_amplitude = 4.0;
  double ar_phi = 0.9;    // price noise autocorrelation
  double ar_sigma = 3.0;  // price noise innovation sd
  double spike_prob = 0.002;
  double spike_mean = 40.0;
  double spike_sd = 30.0;
  int solar_night_start = 21;  // hour_of_day >= start or <= end => solar == 0
  int solar_night_end = 6;
  double nonlinear_load = 0.0;  // optional price-load convexity
  std::vector<PredictorGen> predictors;  // empty = default seven-column roster
  std::uint64_t seed = 1;

  void validate() const;
};

std::vector<PredictorGen> default_predictor_roster();

struct GroundTruth {
  double base_price = 0.0;
  double daily_amplitude = 0.0;
  double weekly_amplitude = 0.0;
  double ar_phi = 0.0;
  double ar_sigma = 0.0;
  double spike_prob = 0.0;
  double nonlinear_load = 0.0;
  std::map<std::string, double> coefficients;
};

// Pure function of the config; the same seed reproduces the panel bit for bit.
std::pair<HourlyPanel, GroundTruth> generate(const SynthConfig& cfg);

// key = value sidecar next to the generated CSV.
void write_ground_truth(const GroundTruth& truth, const std::string& path);

}  // namespace epf
