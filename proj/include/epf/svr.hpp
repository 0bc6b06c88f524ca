#pragma once

#include <Eigen/Dense>

#include "epf/rng.hpp"

namespace epf {

struct SvrConfig {
  double c = 8.0;        // regularization constant, > 0
  double epsilon = 0.1;  // tube half-width, >= 0
  double sigma = 0.0;    // RBF scale; 0 with sigma_median_rule = estimate
  bool sigma_median_rule = true;
  std::vector<double> c_grid{0.5, 2.0, 8.0, 32.0, 64.0};
};

struct SvrFit {
  Eigen::MatrixXd support_rows;
  Eigen::VectorXd alpha;       // dual coefficients of the retained support rows
  Eigen::VectorXd alpha_full;  // all training rows, kept for KKT audits
  double bias = 0.0;
  double sigma = 0.0;
  int iterations = 0;
  double kkt_violation = 0.0;  // stopping-time value, <= the solver tolerance
};

// Epsilon-insensitive kernel regression with an RBF kernel
// k(u, v) = exp(-|u - v|^2 / (2 sigma^2)), solved in the dual by SMO-style
// maximal-violating-pair updates until the KKT violation is <= tol.
// sigma, when not given, is the median pairwise distance over a seeded
// subsample of at most 500 rows.
SvrFit fit_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrConfig& cfg, Rng rng,
               double tol = 1e-4);

double svr_predict(const SvrFit& fit, const Eigen::VectorXd& row);

double median_pairwise_distance(const Eigen::MatrixXd& x, Rng rng, long max_rows = 500);

// Dual objective 0.5 b'Kb - y'b + eps |b|_1 of the full coefficient vector;
// used by tests to compare solvers.
double svr_dual_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double epsilon,
                          double sigma, const Eigen::VectorXd& beta);

// Max violation of the stationarity conditions at (beta, bias); the fit
// satisfies <= tol at every training row.
double svr_kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c,
                         double epsilon, double sigma, const Eigen::VectorXd& beta, double bias);

}  // namespace epf
