#include <doctest.h>

#include <Eigen/Dense>
#include <limits>

#include "epf/errors.hpp"
#include "epf/forest.hpp"
#include "epf/rng.hpp"
#include "oracles.hpp"

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

TEST_CASE("splits match the exhaustive-search oracle on small instances") {
  Rng rng(401);
  for (int rep = 0; rep < 10; ++rep) {
    const long n = 10 + static_cast<long>(rng.bounded(11));  // 10..20 rows
    const Eigen::MatrixXd x = random_matrix(rng, n, 2);
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) y[i] = x(i, 0) > 0 ? 2.0 + rng.normal() : -1.0 + rng.normal();

    std::vector<int> sample(n);
    for (long i = 0; i < n; ++i) sample[i] = static_cast<int>(i);

    const SplitChoice lib = best_split(x, y, sample, {0, 1});
    const SplitChoice oracle = oracles::brute_force_split(x, y, sample);
    REQUIRE(lib.valid == oracle.valid);
    CHECK(lib.column == oracle.column);
    CHECK(lib.threshold == doctest::Approx(oracle.threshold));
    CHECK(lib.score == doctest::Approx(oracle.score).epsilon(1e-9));
  }
}

TEST_CASE("a pure node predicts its mean and never splits") {
  Eigen::MatrixXd x(8, 2);
  Rng rng(402);
  for (long i = 0; i < 8; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(8, 3.5);
  RfConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.m_try = 2;
  const ForestFit fit = fit_forest(x, y, cfg, Rng(1));
  // constant target: no variance to reduce, the root stays a leaf
  CHECK(fit.trees[0].nodes.size() == 1);
  CHECK(fit.trees[0].nodes[0].value == doctest::Approx(3.5));
}

TEST_CASE("identical seeds give bit-identical forests; different seeds differ") {
  Rng rng(403);
  const Eigen::MatrixXd x = random_matrix(rng, 60, 3);
  Eigen::VectorXd y(60);
  for (long i = 0; i < 60; ++i) y[i] = x(i, 0) + 0.2 * rng.normal();
  RfConfig cfg;
  cfg.n_trees = 25;

  const ForestFit a = fit_forest(x, y, cfg, Rng(77));
  const ForestFit b = fit_forest(x, y, cfg, Rng(77));
  const ForestFit c = fit_forest(x, y, cfg, Rng(78));

  Eigen::VectorXd probe(3);
  probe << 0.1, -0.4, 1.0;
  CHECK(a.predict(probe) == b.predict(probe));
  CHECK(a.predict(probe) != c.predict(probe));
}

TEST_CASE("forest predictions stay inside the training target range") {
  Rng rng(404);
  const Eigen::MatrixXd x = random_matrix(rng, 200, 4);
  Eigen::VectorXd y(200);
  for (long i = 0; i < 200; ++i) y[i] = 3.0 * x(i, 1) + rng.normal();
  RfConfig cfg;
  cfg.n_trees = 50;
  const ForestFit fit = fit_forest(x, y, cfg, Rng(5));
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd probe(4);
    for (int j = 0; j < 4; ++j) probe[j] = 5.0 * rng.normal();  // far outside training space
    const double pred = fit.predict(probe);
    CHECK(pred >= fit.y_min);
    CHECK(pred <= fit.y_max);
  }
}

TEST_CASE("config validation and the m_try grid") {
  CHECK(rf_m_try_grid(9) == std::vector<int>{2, 3, 4});
  CHECK(rf_m_try_grid(1) == std::vector<int>{1});   // clipped and deduplicated
  CHECK(rf_m_try_grid(2) == std::vector<int>{1, 2});
  CHECK(rf_m_try_grid(36) == std::vector<int>{5, 6, 7});

  Rng rng(405);
  const Eigen::MatrixXd x = random_matrix(rng, 20, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(20);
  RfConfig cfg;
  cfg.m_try = 3;
  CHECK_THROWS_AS(fit_forest(x, y, cfg, Rng(1)), ConfigError);
  cfg.m_try = 0;
  cfg.n_trees = 0;
  CHECK_THROWS_AS(fit_forest(x, y, cfg, Rng(1)), ConfigError);
}

TEST_CASE("min_node_size stops the recursion") {
  Rng rng(406);
  const Eigen::MatrixXd x = random_matrix(rng, 64, 2);
  Eigen::VectorXd y(64);
  for (long i = 0; i < 64; ++i) y[i] = x(i, 0) + x(i, 1) + 0.1 * rng.normal();
  RfConfig cfg;
  cfg.n_trees = 1;
  cfg.bootstrap = false;
  cfg.m_try = 2;
  cfg.min_node_size = 64;
  const ForestFit stumpless = fit_forest(x, y, cfg, Rng(2));
  CHECK(stumpless.trees[0].nodes.size() == 1);

  cfg.min_node_size = 5;
  const ForestFit deep = fit_forest(x, y, cfg, Rng(2));
  CHECK(deep.trees[0].nodes.size() > 3);
}
