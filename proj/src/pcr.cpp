#include "epf/pcr.hpp"

#include "epf/errors.hpp"

namespace epf {

PcrFit fit_pcr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k) {
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  if (k < 1) throw RankError("component count must be >= 1");

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double rank_tol = sv.size() ? sv[0] * 1e-10 * std::max(x.rows(), x.cols()) : 0.0;
  int rank = 0;
  for (long i = 0; i < sv.size(); ++i) {
    if (sv[i] > rank_tol) ++rank;
  }
  if (k > rank) {
    throw RankError("requested " + std::to_string(k) + " components but the centered design has rank " +
                    std::to_string(rank));
  }

  PcrFit fit;
  fit.k = k;
  fit.loadings = svd.matrixV().leftCols(k);
  // Scores z_j = xc * v_j = sigma_j * u_j are orthogonal, so each coefficient
  // is <z_j, yc> / sigma_j^2 = <u_j, yc> / sigma_j.
  fit.score_coefficients.resize(k);
  for (int j = 0; j < k; ++j) {
    fit.score_coefficients[j] = svd.matrixU().col(j).dot(yc) / sv[j];
  }
  fit.weights = fit.loadings * fit.score_coefficients;
  fit.intercept = y_mean - x_mean.dot(fit.weights);
  return fit;
}

}  // namespace epf
