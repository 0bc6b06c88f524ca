#include <doctest.h>

#include <Eigen/Dense>

#include "epf/blm.hpp"
#include "epf/errors.hpp"
#include "epf/linear_models.hpp"
#include "epf/rng.hpp"

using namespace epf;

TEST_CASE("m_stop = 0 is the intercept-only model") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  Eigen::VectorXd y(5);
  y << 1, 2, 3, 4, 10;
  BlmConfig cfg;
  cfg.m_stop = 0;
  const BlmFit fit = fit_blm(x, y, cfg);
  CHECK(fit.intercept == doctest::Approx(4.0));
  CHECK(fit.weights.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("one centered predictor, nu = 1, one iteration: the OLS slope") {
  Rng rng(501);
  Eigen::MatrixXd x(40, 1);
  for (long i = 0; i < 40; ++i) x(i, 0) = rng.normal();
  x.col(0).array() -= x.col(0).mean();
  Eigen::VectorXd y(40);
  for (long i = 0; i < 40; ++i) y[i] = 3.0 * x(i, 0) + rng.normal();

  BlmConfig cfg;
  cfg.nu = 1.0;
  cfg.m_stop = 1;
  const BlmFit fit = fit_blm(x, y, cfg);
  const double slope = x.col(0).dot(Eigen::VectorXd(y.array() - y.mean())) / x.col(0).squaredNorm();
  CHECK(fit.weights[0] == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("orthonormal design, nu = 1: converges to least squares within 1e-4") {
  Rng rng(502);
  Eigen::MatrixXd raw(50, 5);
  for (long i = 0; i < 50; ++i) {
    for (long j = 0; j < 5; ++j) raw(i, j) = rng.normal();
  }
  // centered orthonormal columns via QR of the centered matrix
  raw.rowwise() -= raw.colwise().mean().eval();
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw)
                                .householderQ() *
                            Eigen::MatrixXd::Identity(50, 5);
  Eigen::VectorXd y(50);
  for (long i = 0; i < 50; ++i) {
    y[i] = 2.0 * q(i, 0) - 1.0 * q(i, 2) + 0.5 * q(i, 4) + 0.05 * rng.normal();
  }

  BlmConfig cfg;
  cfg.nu = 1.0;
  cfg.m_stop = 200;
  const BlmFit fit = fit_blm(q, y, cfg);
  const LinearFit ols = fit_ols(q, y, true);
  CHECK((fit.weights - ols.weights).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("selection ties break toward the lowest column index") {
  Eigen::MatrixXd x(4, 2);
  x.col(0) << 1, -1, 1, -1;
  x.col(1) = x.col(0);  // identical candidate
  Eigen::VectorXd y(4);
  y << 1, -1, 1, -1;
  BlmConfig cfg;
  cfg.m_stop = 3;
  const BlmFit fit = fit_blm(x, y, cfg);
  REQUIRE(!fit.selection_path.empty());
  for (const int j : fit.selection_path) CHECK(j == 0);
  CHECK(fit.weights[1] == 0.0);
}

TEST_CASE("the same predictor may win many rounds under shrinkage") {
  Rng rng(503);
  Eigen::MatrixXd x(30, 2);
  for (long i = 0; i < 30; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = 0.01 * rng.normal();
  }
  Eigen::VectorXd y = 5.0 * x.col(0);
  BlmConfig cfg;
  cfg.nu = 0.5;
  cfg.m_stop = 10;
  const BlmFit fit = fit_blm(x, y, cfg);
  int wins = 0;
  for (const int j : fit.selection_path) wins += (j == 0);
  CHECK(wins >= 5);  // repeat selection under shrinkage until the signal drains
}

TEST_CASE("zero-variance candidates are skipped and recorded") {
  Eigen::MatrixXd x(6, 3);
  Rng rng(504);
  for (long i = 0; i < 6; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = 0.0;  // dead column
    x(i, 2) = rng.normal();
  }
  Eigen::VectorXd y(6);
  for (long i = 0; i < 6; ++i) y[i] = x(i, 0) + x(i, 2);
  BlmConfig cfg;
  cfg.m_stop = 50;
  const BlmFit fit = fit_blm(x, y, cfg);
  REQUIRE(fit.skipped_columns.size() == 1);
  CHECK(fit.skipped_columns[0] == 1);
  CHECK(fit.weights[1] == 0.0);

  cfg.nu = 1.5;
  CHECK_THROWS_AS(fit_blm(x, y, cfg), ConfigError);
  cfg.nu = 0.5;
  cfg.m_stop = -1;
  CHECK_THROWS_AS(fit_blm(x, y, cfg), ConfigError);
}

TEST_CASE("default grid matches the tuning set") {
  const BlmConfig cfg;
  CHECK(cfg.m_stop_grid == std::vector<int>{500, 1000, 1500, 2000, 2500});
  CHECK(cfg.nu == 0.5);
}
