#pragma once

#include <Eigen/Dense>
#include <vector>

namespace epf {

struct BlmConfig {
  int m_stop = 1000;
  double nu = 0.5;  // shrinkage, in (0, 1]
  std::vector<int> m_stop_grid{500, 1000, 1500, 2000, 2500};
};

struct BlmFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;  // training target mean
  std::vector<int> skipped_columns;  // zero-variance candidates, recorded once
  std::vector<int> selection_path;   // chosen column per iteration
};

// Componentwise boosting of simple linear base learners: start from the
// target mean, repeatedly fit each column alone to the current residuals,
// move the best column's coefficient by nu times its least-squares slope.
// Ties break toward the lowest column index; the same column may win many
// rounds. m_stop = 0 yields the intercept-only model.
BlmFit fit_blm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BlmConfig& cfg);

}  // namespace epf
