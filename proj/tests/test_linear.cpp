#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "epf/errors.hpp"
#include "epf/linear_models.hpp"
#include "epf/rng.hpp"

using namespace epf;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, long n, long p) {
  Eigen::MatrixXd x(n, p);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("ridge matches the closed-form oracle on 20 random 50x8 instances") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd x = random_matrix(rng, 50, 8);
    Eigen::VectorXd y(50);
    for (long i = 0; i < 50; ++i) y[i] = rng.normal(0.0, 3.0);
    const double lambda = 0.1 + 5.0 * rng.uniform();

    const LinearFit fit = fit_ridge(x, y, lambda, false);
    // independent closed form: (X'X + lambda I)^-1 X'y via full-pivot LU
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    const Eigen::VectorXd oracle = gram.fullPivLu().solve(x.transpose() * y);
    CHECK((fit.weights - oracle).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("ridge at lambda 0 equals least squares") {
  Rng rng(102);
  const Eigen::MatrixXd x = random_matrix(rng, 40, 5);
  Eigen::VectorXd y(40);
  for (long i = 0; i < 40; ++i) y[i] = x.row(i).sum() + rng.normal();
  const LinearFit ridge = fit_ridge(x, y, 0.0, true);
  const LinearFit ols = fit_ols(x, y, true);
  CHECK((ridge.weights - ols.weights).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(ridge.intercept == doctest::Approx(ols.intercept).epsilon(1e-8));
}

TEST_CASE("singular unpenalized system names ridge as the way out") {
  Eigen::MatrixXd x(4, 2);
  x.col(0) << 1, 2, 3, 4;
  x.col(1) = 2.0 * x.col(0);
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  CHECK_THROWS_WITH_AS(fit_ols(x, y, false), doctest::Contains("ridge"), SingularError);
}

TEST_CASE("lasso at lambda_max and beyond returns exactly zero slopes") {
  Rng rng(103);
  const Eigen::MatrixXd x = random_matrix(rng, 60, 6);
  Eigen::VectorXd y(60);
  for (long i = 0; i < 60; ++i) y[i] = 2.0 * x(i, 0) - x(i, 3) + rng.normal();

  const double lmax = lasso_lambda_max(x, y);
  for (const double lambda : {lmax, 1.5 * lmax, 10.0 * lmax}) {
    const LinearFit fit = fit_lasso(x, y, lambda, true);
    for (long j = 0; j < 6; ++j) CHECK(fit.weights[j] == 0.0);
    CHECK(fit.intercept == doctest::Approx(y.mean()));
  }
  // strictly below lambda_max at least one slope activates
  const LinearFit below = fit_lasso(x, y, 0.99 * lmax, true);
  CHECK(below.weights.lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("lasso at lambda 0 agrees with least squares") {
  Rng rng(104);
  const Eigen::MatrixXd x = random_matrix(rng, 80, 4);
  Eigen::VectorXd y(80);
  for (long i = 0; i < 80; ++i) y[i] = x(i, 1) - 0.5 * x(i, 2) + 0.1 * rng.normal();
  const LinearFit cd = fit_lasso(x, y, 0.0, true, 1e-10);
  const LinearFit ols = fit_ols(x, y, true);
  CHECK((cd.weights - ols.weights).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("lambda_max properties") {
  Rng rng(105);
  Eigen::MatrixXd x(32, 1);
  for (long i = 0; i < 32; ++i) x(i, 0) = rng.normal();
  x.col(0).array() -= x.col(0).mean();
  x.col(0) /= x.col(0).norm();  // orthonormal single column
  const Eigen::VectorXd y = 2.0 * x.col(0);

  const double lmax = lasso_lambda_max(x, y);
  CHECK(lmax == doctest::Approx(std::abs(x.col(0).dot(y)) / 32.0));

  // scaling the target scales lambda_max linearly
  CHECK(lasso_lambda_max(x, 10.0 * y) == doctest::Approx(10.0 * lmax));

  // the coefficient path starts at zero when run at lambda_max
  const LinearFit at_max = fit_lasso(x, y, lmax, true);
  CHECK(at_max.weights[0] == 0.0);

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(32, 4.2);
  CHECK_THROWS_AS(lasso_lambda_max(x, constant), DegenerateError);
}

TEST_CASE("lambda grid: length 100, strictly decreasing, down to 0.01 lambda_max") {
  const auto grid = lambda_grid(5.0);
  REQUIRE(grid.size() == 100);
  CHECK(grid.front() == doctest::Approx(5.0));
  CHECK(grid.back() == doctest::Approx(0.05));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
}

TEST_CASE("lasso path is continuous across adjacent grid lambdas") {
  Rng rng(106);
  const Eigen::MatrixXd x = random_matrix(rng, 50, 5);
  Eigen::VectorXd y(50);
  for (long i = 0; i < 50; ++i) y[i] = x(i, 0) + 0.5 * x(i, 2) + 0.2 * rng.normal();

  const auto grid = lambda_grid(lasso_lambda_max(x, y), 100);
  LinearFit prev = fit_lasso(x, y, grid[0], true);
  double max_step = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const LinearFit cur = fit_lasso(x, y, grid[g], true, 1e-9, 10000, &prev);
    max_step = std::max(max_step, (cur.weights - prev.weights).lpNorm<Eigen::Infinity>());
    prev = cur;
  }
  // adjacent grid points differ by < 5% of lambda_max; coefficient moves stay
  // of the same order, nowhere near the full path range
  CHECK(max_step < 0.2);
}

TEST_CASE("ridge predictions are invariant to duplicating a standardized column") {
  Rng rng(107);
  Eigen::MatrixXd x = random_matrix(rng, 64, 3);
  for (long j = 0; j < 3; ++j) {
    x.col(j).array() -= x.col(j).mean();
    x.col(j) /= std::sqrt(x.col(j).squaredNorm() / 63.0);
  }
  Eigen::VectorXd y(64);
  for (long i = 0; i < 64; ++i) y[i] = x(i, 0) - x(i, 1) + 0.3 * rng.normal();

  Eigen::MatrixXd x_dup(64, 4);
  x_dup.leftCols(3) = x;
  x_dup.col(3) = x.col(0);

  // Splitting the weight across the duplicated pair halves that direction's
  // effective penalty, so exact invariance needs lambda << n; at 1e-5 the
  // prediction shift is bounded well below the 1e-6 tolerance.
  const LinearFit base = fit_ridge(x, y, 1e-5, true);
  const LinearFit dup = fit_ridge(x_dup, y, 1e-5, true);
  const Eigen::VectorXd pred_base =
      (x * base.weights).array() + base.intercept;
  const Eigen::VectorXd pred_dup = (x_dup * dup.weights).array() + dup.intercept;
  CHECK((pred_base - pred_dup).lpNorm<Eigen::Infinity>() <= 1e-6);
  // the duplicated pair shares the original column's weight
  CHECK(dup.weights[0] == doctest::Approx(dup.weights[3]).epsilon(1e-8));
}
