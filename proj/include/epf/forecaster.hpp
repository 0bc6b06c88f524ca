#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "epf/arma.hpp"
#include "epf/blm.hpp"
#include "epf/features.hpp"
#include "epf/forest.hpp"
#include "epf/panel.hpp"
#include "epf/rng.hpp"
#include "epf/svr.hpp"

namespace epf {

enum class ModelKind {
  Naive,
  Dlr,
  SeasonalArma,
  SeasonalArmax,
  Ridge,
  Lasso,
  Svr,
  Pcr,
  RandomForest,
  Blm,
  Ensemble,
};

const char* kind_name(ModelKind kind);
ModelKind kind_from_name(const std::string& name);  // ConfigError on unknown

struct PenaltyConfig {
  double lambda = 0.0;
  int exponent = 2;      // 1 = LASSO, 2 = ridge
  int grid_length = 100;
};

struct PcrConfig {
  int k = 0;  // 0 = choose via tuning; otherwise fixed
};

// Declarative model configuration: kind, feature roster, and the
// kind-specific hyperparameter record.
struct ForecasterSpec {
  ModelKind kind = ModelKind::Naive;
  std::string name;  // roster label; defaults to kind_name
  FeatureSpec features;
  PenaltyConfig penalty;
  SvrConfig svr;
  RfConfig rf;
  PcrConfig pcr;
  BlmConfig blm;
  ArmaOrder arma;
  std::vector<ForecasterSpec> ensemble_members;
  long ensemble_subset_hours = 504;  // stacking fold size d

  std::string label() const { return name.empty() ? kind_name(kind) : name; }
  void validate() const;
};

// Roster defaults: feature roster of the headline comparison (seasonal lags,
// weekend + hour dummies), standardization on for the scale-sensitive kinds,
// recent lags reserved to the ARMA family.
ForecasterSpec make_default_spec(ModelKind kind, std::vector<std::string> externals = {});

// A fitted model. forecast_day emits the 24 hours of the day starting at
// day_start, reading prices strictly before day_start (its own recursive
// forecasts stand in for later hours) and predictor values of the target day,
// which are known when the order book closes. Deterministic and const.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::array<double, 24> forecast_day(const HourlyPanel& panel, long day_start) const = 0;
  virtual ModelKind kind() const = 0;
  // Versioned text format: kind, hyperparameters, coefficient table.
  virtual void serialize(std::ostream& os) const = 0;
  // Diagnostics raised during the fit (collinearity fallback, MA reflection).
  virtual const std::vector<std::string>& flags() const;
};

struct TrainWindow {
  long begin = 0;
  long end = 0;  // order-book cutoff: the first hour of the forecast day
};

// Fits spec on the panel's window. Throws HistoryError when the window is
// infeasible and model-specific errors otherwise; the backtest maps failures
// to the naive fallback.
std::unique_ptr<Forecaster> fit_forecaster(const HourlyPanel& panel, const ForecasterSpec& spec,
                                           TrainWindow window, Rng rng);

struct EnsembleWeights {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  bool ridge_fallback = false;
};

// Least-squares stacking weights (with intercept) over held-out member
// predictions; exactly collinear members fall back to ridge with lambda 1e-6.
EnsembleWeights fit_ensemble_weights(const Eigen::MatrixXd& member_predictions,
                                     const Eigen::VectorXd& realized);

}  // namespace epf
