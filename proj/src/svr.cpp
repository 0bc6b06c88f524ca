#include "epf/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epf/errors.hpp"
#include "epf/kernels.hpp"

namespace epf {

namespace {

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& x, double sigma) {
  const long l = x.rows();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // Row-major copy so sq_dist streams contiguously.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;
  Eigen::MatrixXd k(l, l);
  for (long i = 0; i < l; ++i) {
    k(i, i) = 1.0;
    for (long j = i + 1; j < l; ++j) {
      const double d2 = kernels::sq_dist(xr.row(i).data(), xr.row(j).data(), x.cols());
      const double v = std::exp(-d2 * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

double median_pairwise_distance(const Eigen::MatrixXd& x, Rng rng, long max_rows) {
  const long l = x.rows();
  if (l < 2) throw ConfigError("median distance heuristic needs at least 2 rows");
  std::vector<long> idx(l);
  for (long i = 0; i < l; ++i) idx[i] = i;
  if (l > max_rows) {
    // Partial Fisher-Yates draw of max_rows distinct indices.
    for (long i = 0; i < max_rows; ++i) {
      const long j = i + static_cast<long>(rng.bounded(static_cast<std::uint64_t>(l - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(max_rows);
  }
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      dists.push_back(std::sqrt(
          kernels::sq_dist(xr.row(idx[a]).data(), xr.row(idx[b]).data(), x.cols())));
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return std::max(dists[mid], 1e-8);
}

// SMO on the equivalent box problem: minimize
//   W(b) = 0.5 b'Kb - y'b + eps |b|_1,  sum(b) = 0,  -C <= b_i <= C,
// tracked as split parts ap_i = max(b_i, 0), am_i = max(-b_i, 0) so the
// epsilon kink at 0 becomes a plain bound. Each step picks the most violating
// feasible (increase, decrease) pair and moves mass between the two rows.
SvrFit fit_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrConfig& cfg, Rng rng,
               double tol) {
  const long l = x.rows();
  if (l < 2) throw ConfigError("SVR needs at least 2 rows");
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  if (cfg.c <= 0) throw ConfigError("SVR C must be > 0");
  if (cfg.epsilon < 0) throw ConfigError("SVR epsilon must be >= 0");

  double sigma = cfg.sigma;
  if (sigma <= 0) {
    if (!cfg.sigma_median_rule) throw ConfigError("SVR sigma must be > 0");
    sigma = median_pairwise_distance(x, rng.derive("svr-sigma"));
  }

  const double c = cfg.c;
  const double eps = cfg.epsilon;
  const Eigen::MatrixXd k = rbf_kernel_matrix(x, sigma);

  Eigen::VectorXd ap = Eigen::VectorXd::Zero(l);
  Eigen::VectorXd am = Eigen::VectorXd::Zero(l);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(l);  // K * beta

  // Selection value for row i: y_i - h_i - eps on the "raise beta through the
  // positive part" side, y_i - h_i + eps on the "raise through the negative
  // part" side.
  const long max_iter = 2'000'000;
  int iter = 0;
  double gap = 0.0;
  while (true) {
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    long up_i = -1, low_i = -1;
    bool up_minus_part = false, low_plus_part = false;
    for (long i = 0; i < l; ++i) {
      const double base = y[i] - h[i];
      if (ap[i] < c && base - eps > up_best) {
        up_best = base - eps;
        up_i = i;
        up_minus_part = false;
      }
      if (am[i] > 0 && base + eps > up_best) {
        up_best = base + eps;
        up_i = i;
        up_minus_part = true;
      }
      if (ap[i] > 0 && base - eps < low_best) {
        low_best = base - eps;
        low_i = i;
        low_plus_part = true;
      }
      if (am[i] < c && base + eps < low_best) {
        low_best = base + eps;
        low_i = i;
        low_plus_part = false;
      }
    }
    gap = up_best - low_best;
    if (gap <= tol || up_i < 0 || low_i < 0) break;
    if (++iter > max_iter) {
      std::vector<double> best(l);
      for (long i = 0; i < l; ++i) best[i] = ap[i] - am[i];
      throw ConvergenceError("SVR solver hit the iteration cap with KKT gap " +
                                 std::to_string(gap),
                             best);
    }

    const long i = up_i, j = low_i;
    const double eta = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12);
    double step = gap / eta;
    // Box caps: raising beta_i consumes either headroom of ap_i or the mass
    // in am_i; lowering beta_j symmetrically.
    step = std::min(step, up_minus_part ? am[i] : c - ap[i]);
    step = std::min(step, low_plus_part ? ap[j] : c - am[j]);
    if (step <= 0) break;  // numerically stuck at a bound

    if (up_minus_part) {
      am[i] -= step;
    } else {
      ap[i] += step;
    }
    if (low_plus_part) {
      ap[j] -= step;
    } else {
      am[j] += step;
    }
    kernels::axpy(step, k.col(i).data(), h.data(), l);
    kernels::axpy(-step, k.col(j).data(), h.data(), l);
  }

  Eigen::VectorXd beta = ap - am;

  // Bias: exact on free rows, otherwise the midpoint of the feasible band.
  double bias;
  double free_sum = 0.0;
  long free_count = 0;
  for (long i = 0; i < l; ++i) {
    if (ap[i] > 0 && ap[i] < c && am[i] == 0) {
      free_sum += y[i] - h[i] - eps;
      ++free_count;
    } else if (am[i] > 0 && am[i] < c && ap[i] == 0) {
      free_sum += y[i] - h[i] + eps;
      ++free_count;
    }
  }
  if (free_count > 0) {
    bias = free_sum / free_count;
  } else {
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    for (long i = 0; i < l; ++i) {
      const double base = y[i] - h[i];
      if (ap[i] < c) up_best = std::max(up_best, base - eps);
      if (am[i] > 0) up_best = std::max(up_best, base + eps);
      if (ap[i] > 0) low_best = std::min(low_best, base - eps);
      if (am[i] < c) low_best = std::min(low_best, base + eps);
    }
    bias = 0.5 * (up_best + low_best);
  }

  SvrFit fit;
  fit.sigma = sigma;
  fit.bias = bias;
  fit.iterations = iter;
  fit.kkt_violation = std::max(gap, 0.0);
  fit.alpha_full = beta;

  std::vector<long> support;
  for (long i = 0; i < l; ++i) {
    if (std::abs(beta[i]) > 1e-8) support.push_back(i);
  }
  fit.support_rows.resize(static_cast<long>(support.size()), x.cols());
  fit.alpha.resize(static_cast<long>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    fit.support_rows.row(static_cast<long>(s)) = x.row(support[s]);
    fit.alpha[static_cast<long>(s)] = beta[support[s]];
  }
  return fit;
}

double svr_predict(const SvrFit& fit, const Eigen::VectorXd& row) {
  const double inv = 1.0 / (2.0 * fit.sigma * fit.sigma);
  double out = fit.bias;
  for (long s = 0; s < fit.alpha.size(); ++s) {
    const double d2 = kernels::sq_dist(fit.support_rows.row(s).data(), row.data(), row.size());
    out += fit.alpha[s] * std::exp(-d2 * inv);
  }
  return out;
}

double svr_dual_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double epsilon,
                          double sigma, const Eigen::VectorXd& beta) {
  const Eigen::MatrixXd k = rbf_kernel_matrix(x, sigma);
  return 0.5 * beta.dot(k * beta) - y.dot(beta) + epsilon * beta.lpNorm<1>();
}

double svr_kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double c,
                         double epsilon, double sigma, const Eigen::VectorXd& beta, double bias) {
  const Eigen::MatrixXd k = rbf_kernel_matrix(x, sigma);
  const Eigen::VectorXd h = k * beta;
  double worst = 0.0;
  for (long i = 0; i < beta.size(); ++i) {
    const double base = y[i] - h[i];
    const double ap = std::max(beta[i], 0.0);
    const double am = std::max(-beta[i], 0.0);
    if (ap < c) worst = std::max(worst, (base - epsilon) - bias);
    if (am > 0) worst = std::max(worst, (base + epsilon) - bias);
    if (ap > 0) worst = std::max(worst, bias - (base - epsilon));
    if (am < c) worst = std::max(worst, bias - (base + epsilon));
  }
  return worst;
}

}  // namespace epf
