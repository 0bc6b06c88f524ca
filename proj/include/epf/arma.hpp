#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "epf/features.hpp"
#include "epf/panel.hpp"

namespace epf {

struct ArmaOrder {
  int p = 1;  // direct previous-hour AR terms
  int q = 1;  // MA terms
  bool select_by_aicc = false;
  std::vector<std::pair<int, int>> grid;  // empty = {1,2,3} x {0,1,2}

  std::vector<std::pair<int, int>> effective_grid() const;
  void validate() const;
};

struct ArmaFit {
  int p = 0, q = 0;
  // Intercept followed by the design columns of the mean equation: recent
  // lags, seasonal lags (24/48/168), dummies, exogenous predictors.
  Eigen::VectorXd mean_params;
  std::vector<std::string> mean_names;
  Eigen::VectorXd theta;  // MA coefficients
  double css = 0.0;
  double aicc = 0.0;
  long n_obs = 0;
  bool ma_reflected = false;  // estimate reflected into the invertible region
  int iterations = 0;
};

// Conditional-sum-of-squares estimation on target hours [t_begin, t_end).
// For fixed MA coefficients the conditional residuals are linear in the mean
// parameters, so those are profiled out exactly (least squares on MA-filtered
// regressors); a BFGS iteration with analytic gradients runs over the MA
// coefficients alone, gradient tolerance 1e-6 (relative to the CSS scale),
// at most 500 iterations. q = 0 therefore reduces to plain least squares.
// base.n_recent_lags is overridden by the order's p. With select_by_aicc all
// grid candidates are fit on the same rows and the minimal-AICc order wins.
ArmaFit fit_seasonal_arma(const HourlyPanel& panel, const FeatureSpec& base,
                          const ArmaOrder& order, long t_begin, long t_end);

// Conditional residuals of a fitted model over [t_begin, t_end); used when
// re-deriving the MA tail ahead of a forecast day.
Eigen::VectorXd arma_residuals(const HourlyPanel& panel, const FeatureSpec& base,
                               const ArmaFit& fit, long t_begin, long t_end);

// Roots of 1 + theta_1 z + ... + theta_q z^q inside the unit circle are
// reflected to their reciprocal conjugates; *changed reports whether any
// coefficient moved.
Eigen::VectorXd reflect_ma_coefficients(const Eigen::VectorXd& theta, bool* changed = nullptr);

}  // namespace epf
