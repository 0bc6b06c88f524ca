#include "epf/linear_models.hpp"

#include <cmath>

#include "epf/errors.hpp"
#include "epf/kernels.hpp"

namespace epf {

namespace {

struct Centered {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd x_mean;
  double y_mean = 0.0;
};

Centered center_data(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Centered c;
  c.x_mean = x.colwise().mean();
  c.y_mean = y.mean();
  c.x = x.rowwise() - c.x_mean.transpose();
  c.y = y.array() - c.y_mean;
  return c;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

LinearFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool fit_intercept) {
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  const auto solve = [](const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols()) {
      throw SingularError("unpenalized system is rank deficient (rank " +
                          std::to_string(qr.rank()) + " of " + std::to_string(a.cols()) +
                          "); consider ridge");
    }
    return Eigen::VectorXd(qr.solve(b));
  };
  LinearFit fit;
  if (fit_intercept) {
    const Centered c = center_data(x, y);
    fit.weights = solve(c.x, c.y);
    fit.intercept = c.y_mean - c.x_mean.dot(fit.weights);
  } else {
    fit.weights = solve(x, y);
  }
  return fit;
}

LinearFit fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                    bool fit_intercept) {
  if (lambda < 0) throw ConfigError("ridge lambda must be >= 0");
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  const auto solve = [&](const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += lambda;
    return Eigen::VectorXd(gram.ldlt().solve(a.transpose() * b));
  };
  LinearFit fit;
  if (fit_intercept) {
    const Centered c = center_data(x, y);
    fit.weights = solve(c.x, c.y);
    fit.intercept = c.y_mean - c.x_mean.dot(fit.weights);
  } else {
    fit.weights = solve(x, y);
  }
  return fit;
}

LinearFit fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                    bool fit_intercept, double tol, int max_sweeps,
                    const LinearFit* warm_start) {
  if (lambda < 0) throw ConfigError("lasso lambda must be >= 0");
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  const long n = x.rows(), p = x.cols();

  Eigen::MatrixXd xc;
  Eigen::VectorXd yc, x_mean;
  double y_mean = 0.0;
  const Eigen::MatrixXd* xp = &x;
  const Eigen::VectorXd* yp = &y;
  if (fit_intercept) {
    Centered c = center_data(x, y);
    xc = std::move(c.x);
    yc = std::move(c.y);
    x_mean = std::move(c.x_mean);
    y_mean = c.y_mean;
    xp = &xc;
    yp = &yc;
  }

  Eigen::VectorXd col_sq(p);
  for (long j = 0; j < p; ++j) {
    col_sq[j] = kernels::sum_sq(xp->col(j).data(), n) / n;
  }

  LinearFit fit;
  fit.weights = (warm_start && warm_start->weights.size() == p) ? warm_start->weights
                                                                : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = *yp - *xp * fit.weights;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (long j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;  // constant (centered to zero) column stays at 0
      const double old = fit.weights[j];
      const double rho = kernels::dot(xp->col(j).data(), resid.data(), n) / n + col_sq[j] * old;
      const double next = soft_threshold(rho, lambda) / col_sq[j];
      if (next != old) {
        kernels::axpy(old - next, xp->col(j).data(), resid.data(), n);
        fit.weights[j] = next;
        max_change = std::max(max_change, std::abs(next - old));
      }
    }
    fit.sweeps = sweep + 1;
    if (max_change <= tol) break;
  }
  if (fit_intercept) fit.intercept = y_mean - x_mean.dot(fit.weights);
  return fit;
}

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0 || x.cols() == 0) throw EmptyError("empty design");
  const long n = x.rows();
  const Eigen::VectorXd yc = y.array() - y.mean();
  double best = 0.0;
  for (long j = 0; j < x.cols(); ++j) {
    best = std::max(best, std::abs(kernels::dot(x.col(j).data(), yc.data(), n)) / n);
  }
  if (best <= 0.0) {
    throw DegenerateError("lambda_max is zero (constant target or all-zero design)");
  }
  return best;
}

std::vector<double> lambda_grid(double lambda_max, int length) {
  if (lambda_max <= 0) throw DegenerateError("lambda_max must be positive");
  if (length < 2) throw ConfigError("lambda grid needs at least 2 points");
  std::vector<double> grid(length);
  const double ratio = 0.01;
  for (int i = 0; i < length; ++i) {
    grid[i] = lambda_max * std::pow(ratio, static_cast<double>(i) / (length - 1));
  }
  return grid;
}

}  // namespace epf
