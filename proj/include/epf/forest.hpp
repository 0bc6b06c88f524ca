#pragma once

#include <Eigen/Dense>
#include <vector>

#include "epf/rng.hpp"

namespace epf {

struct RfConfig {
  int n_trees = 500;
  int min_node_size = 5;
  int m_try = 0;  // 0 = floor(sqrt(p))
  bool bootstrap = true;
};

// Tuning candidates {floor(sqrt(p))-1, floor(sqrt(p)), floor(sqrt(p))+1},
// clipped to [1, p] and deduplicated.
std::vector<int> rf_m_try_grid(int p);

struct TreeNode {
  int left = -1;
  int right = -1;  // leaf when left < 0
  int column = -1;
  double threshold = 0.0;
  double value = 0.0;  // leaf mean
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const Eigen::VectorXd& row) const;
};

struct ForestFit {
  std::vector<Tree> trees;
  double y_min = 0.0, y_max = 0.0;

  double predict(const Eigen::VectorXd& row) const;
};

struct SplitChoice {
  bool valid = false;
  int column = -1;
  double threshold = 0.0;
  double score = 0.0;  // decrease in node SSE
};

// Best variance-reducing axis-aligned split of the given sample over the
// candidate columns. Thresholds are midpoints between adjacent distinct
// values; ties break toward the lowest column index, then lowest threshold.
SplitChoice best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const std::vector<int>& sample, const std::vector<int>& columns);

// Grows n_trees regression trees on bootstrap samples; at each node m_try
// uniformly drawn columns compete. Per-tree RNG streams derive from
// (rng, tree index), so forecasts are bit-identical for a fixed seed and the
// trees may be grown in any order.
ForestFit fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfConfig& cfg,
                     Rng rng);

}  // namespace epf
