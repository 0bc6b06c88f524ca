#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "epf/backtest.hpp"

namespace epf {

// A removable unit: external predictor columns by name, or the tokens
// @hour_dummies, @weekend_dummies, @lag24, @lag48, @lag168.
struct SensitivityGroup {
  std::string name;
  std::vector<std::string> members;
};

struct SensitivityReport {
  std::vector<std::string> models;  // fused roster; the naive benchmark is excluded
  std::vector<std::string> groups;
  Eigen::MatrixXd s;        // models x groups, S = RMSE without group / baseline RMSE
  Eigen::VectorXd weights;  // normalized clipped out-of-sample R^2, sums to 1
  Eigen::VectorXd fused;    // per group, convex combination over models
  Eigen::VectorXd scaled;   // fused rescaled so the maximum is 100
  std::vector<int> ranking; // group indices by descending fused score
  std::vector<double> baseline_rmse;
  std::vector<double> baseline_r2;
};

// Leave-one-group-out sensitivity: runs the baseline rolling backtest, then
// one full rerun per group with that group's columns removed from every
// model, and fuses the per-model RMSE ratios with normalized-R^2 weights.
SensitivityReport run_sensitivity(const HourlyPanel& panel, const BacktestPlan& plan,
                                  const std::vector<SensitivityGroup>& groups);

// Applies a group removal to one model's feature roster.
FeatureSpec remove_group(const FeatureSpec& features, const SensitivityGroup& group);

void write_sensitivity_csv(const SensitivityReport& report, const std::string& path);

}  // namespace epf
