#include "epf/blm.hpp"

#include "epf/errors.hpp"
#include "epf/kernels.hpp"

namespace epf {

BlmFit fit_blm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BlmConfig& cfg) {
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  if (cfg.m_stop < 0) throw ConfigError("m_stop must be >= 0");
  if (cfg.nu <= 0 || cfg.nu > 1) throw ConfigError("nu must be in (0, 1]");
  const long n = x.rows(), p = x.cols();

  BlmFit fit;
  fit.intercept = y.mean();
  fit.weights = Eigen::VectorXd::Zero(p);
  fit.selection_path.reserve(cfg.m_stop);

  Eigen::VectorXd col_sq(p);
  for (long j = 0; j < p; ++j) {
    col_sq[j] = kernels::sum_sq(x.col(j).data(), n);
    if (col_sq[j] == 0.0) fit.skipped_columns.push_back(static_cast<int>(j));
  }

  Eigen::VectorXd resid = y.array() - fit.intercept;
  for (int m = 0; m < cfg.m_stop; ++m) {
    // Minimum residual SSE == maximum slope^2 * <x_j, x_j>.
    long best_j = -1;
    double best_gain = 0.0, best_slope = 0.0;
    for (long j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double slope = kernels::dot(x.col(j).data(), resid.data(), n) / col_sq[j];
      const double gain = slope * slope * col_sq[j];
      if (best_j < 0 || gain > best_gain) {
        best_j = j;
        best_gain = gain;
        best_slope = slope;
      }
    }
    if (best_j < 0) break;  // every candidate column has zero variance
    const double delta = cfg.nu * best_slope;
    fit.weights[best_j] += delta;
    kernels::axpy(-delta, x.col(best_j).data(), resid.data(), n);
    fit.selection_path.push_back(static_cast<int>(best_j));
  }
  return fit;
}

}  // namespace epf
