#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "epf/panel.hpp"

namespace epf {

// Regressor roster for one model: seasonal price lags, optional direct
// previous-hour lags (ARMA-family only), weekend and hour-of-day dummies,
// and named external predictor columns.
struct FeatureSpec {
  std::vector<int> use_lags{24, 48, 168};  // subset of {24, 48, 168}
  int n_recent_lags = 0;                   // p direct previous-hour lags
  bool weekend_dummies = true;
  bool hour_dummies = true;
  // Keep all 24 hour dummies (penalized/tree models tolerate the collinearity
  // with an intercept); default drops hour 24.
  bool all_hour_dummies = false;
  std::vector<std::string> predictors;
  bool standardize = false;

  int max_lag() const;
  void validate() const;
};

struct Standardization {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
  std::vector<std::uint8_t> affected;  // per column; dummies stay untouched

  void apply_row(Eigen::Ref<Eigen::VectorXd> row) const;
  void invert_row(Eigen::Ref<Eigen::VectorXd> row) const;
  bool empty() const { return center.size() == 0; }
};

struct FeatureMatrix {
  Eigen::MatrixXd x;  // T' x p, column-major
  Eigen::VectorXd y;
  std::vector<long> row_times;  // hour index of each row's target
  std::vector<std::string> column_names;
  std::vector<std::uint8_t> is_dummy;
  bool standardized = false;
  Standardization stats;

  long rows() const { return x.rows(); }
  long cols() const { return x.cols(); }
  long column_index(const std::string& name) const;  // -1 if absent
};

// Rows for target hours [t_begin, t_end): row t carries the enabled lags,
// recent lags p_{t-1}..p_{t-p}, dummies at t, and predictor values x_t;
// the target is p_t. Requires t_begin >= max lag.
FeatureMatrix build_features(const HourlyPanel& panel, const FeatureSpec& spec, long t_begin,
                             long t_end);

// Full-panel build starting at the first hour with complete lag history
// (T' = T - max lag).
FeatureMatrix build_features(const HourlyPanel& panel, const FeatureSpec& spec);

// Single row of regressors for target hour t (no target value needed); used
// to score the 24 hours of a forecast day. Prices are read only at t - lag.
Eigen::VectorXd build_feature_row(const HourlyPanel& panel, const FeatureSpec& spec, long t);

// Centers and scales non-dummy columns to unit sample std, recording the
// stats so test rows are transformed with training statistics. Throws
// VarianceError on a zero-variance non-dummy column and ConfigError when the
// matrix is already standardized.
FeatureMatrix standardize_fit_transform(FeatureMatrix m, bool exclude_dummies = true);

}  // namespace epf
