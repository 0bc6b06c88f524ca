#pragma once

#include <Eigen/Dense>
#include <vector>

namespace epf {

struct LinearFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int sweeps = 0;  // coordinate descent only
};

// Least squares, optionally with an unpenalized intercept. Throws
// SingularError (suggesting ridge) when the system is rank deficient.
LinearFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool fit_intercept);

// Minimizes ||y - Xw||^2 + lambda * ||w||^2; with fit_intercept the data are
// centered first and the intercept stays unpenalized. lambda = 0 reduces to
// least squares via the normal equations.
LinearFit fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                    bool fit_intercept);

// Coordinate descent for (1/(2n))||y - Xw||^2 + lambda * |w|_1. Converges when
// the largest coefficient change in a sweep is <= tol (default 1e-7) or after
// max_sweeps full sweeps. Yields exactly-zero slopes for lambda >= lambda_max.
LinearFit fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                    bool fit_intercept, double tol = 1e-7, int max_sweeps = 10000,
                    const LinearFit* warm_start = nullptr);

// Smallest lambda with an all-zero LASSO slope vector:
// max_j |<x_j, y - mean(y)>| / n. Throws DegenerateError when it is 0.
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Exponentially decreasing grid from lambda_max down to 0.01 * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int length = 100);

}  // namespace epf
