#pragma once

#include <Eigen/Dense>

namespace epf {

struct PcrFit {
  Eigen::VectorXd weights;    // equivalent linear form on raw features
  double intercept = 0.0;
  int k = 0;
  Eigen::MatrixXd loadings;   // first k right-singular vectors
  Eigen::VectorXd score_coefficients;
};

// Regresses the centered target on the first k principal component scores of
// the centered design. Throws RankError when k exceeds the design's rank.
PcrFit fit_pcr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k);

}  // namespace epf
