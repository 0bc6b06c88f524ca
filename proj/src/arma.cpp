#include "epf/arma.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "epf/errors.hpp"

namespace epf {

void ArmaOrder::validate() const {
  if (p < 0 || q < 0) throw ConfigError("ARMA orders must be >= 0");
  if (!select_by_aicc && p + q < 1) {
    throw ConfigError("degenerate ARMA order: p + q must be >= 1");
  }
}

std::vector<std::pair<int, int>> ArmaOrder::effective_grid() const {
  if (!grid.empty()) return grid;
  std::vector<std::pair<int, int>> out;
  for (int gp = 1; gp <= 3; ++gp) {
    for (int gq = 0; gq <= 2; ++gq) out.emplace_back(gp, gq);
  }
  return out;
}

namespace {

// w = L(theta)^-1 v with the MA filter recursion w_t = v_t - sum_j theta_j w_{t-j},
// zero state before the window.
void ma_filter(const Eigen::VectorXd& theta, const double* v, double* w, long n) {
  const long q = theta.size();
  for (long t = 0; t < n; ++t) {
    double acc = v[t];
    for (long j = 1; j <= q && j <= t; ++j) acc -= theta[j - 1] * w[t - j];
    w[t] = acc;
  }
}

struct CssState {
  Eigen::VectorXd psi;       // mean parameters at the inner optimum
  Eigen::VectorXd residual;  // conditional residuals
  double css = 0.0;
};

// Exact inner least squares for the mean parameters given theta.
CssState css_solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& theta) {
  const long n = design.rows(), p = design.cols();
  Eigen::MatrixXd design_f(n, p);
  Eigen::VectorXd y_f(n);
  for (long j = 0; j < p; ++j) {
    ma_filter(theta, design.col(j).data(), design_f.col(j).data(), n);
  }
  ma_filter(theta, y.data(), y_f.data(), n);

  CssState state;
  if (design_f.allFinite() && y_f.allFinite()) {
    state.psi = design_f.householderQr().solve(y_f);
    state.residual = y_f - design_f * state.psi;
    state.css = state.residual.squaredNorm();
  } else {
    // Explosive filter (theta far outside the invertible region); report an
    // infinite objective so line searches back off.
    state.psi = Eigen::VectorXd::Zero(p);
    state.residual = Eigen::VectorXd::Zero(n);
    state.css = std::numeric_limits<double>::infinity();
  }
  return state;
}

// dCSS/dtheta_j = 2 sum_t eps_t * d eps_t/d theta_j with
// d eps_t/d theta_j = -eps_{t-j} - sum_k theta_k d eps_{t-k}/d theta_j.
// The mean-parameter part vanishes at the inner optimum.
Eigen::VectorXd css_gradient(const Eigen::VectorXd& theta, const Eigen::VectorXd& residual) {
  const long q = theta.size(), n = residual.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(q);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, q);
  for (long t = 0; t < n; ++t) {
    for (long j = 1; j <= q; ++j) {
      double acc = (t >= j) ? -residual[t - j] : 0.0;
      for (long k = 1; k <= q && k <= t; ++k) acc -= theta[k - 1] * d(t - k, j - 1);
      d(t, j - 1) = acc;
      grad[j - 1] += 2.0 * residual[t] * acc;
    }
  }
  return grad;
}

// Roots of 1 + theta_1 z + ... + theta_q z^q via the companion matrix of the
// monic reversal (leading zero coefficients shrink the degree).
std::vector<std::complex<double>> ma_roots(const Eigen::VectorXd& theta) {
  long degree = theta.size();
  while (degree > 0 && theta[degree - 1] == 0.0) --degree;
  std::vector<std::complex<double>> roots;
  if (degree == 0) return roots;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (long i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (long i = 0; i < degree; ++i) {
    // monic polynomial z^d + (theta_{d-1}/theta_d) z^{d-1} + ... + 1/theta_d
    const double coeff = (i == degree - 1) ? 1.0 : theta[degree - 2 - i];
    companion(degree - 1 - i, degree - 1) = -coeff / theta[degree - 1];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  for (long i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

// Reflects roots inside the unit circle to their reciprocal conjugates and
// rebuilds real coefficients. Returns true when a reflection happened.
bool reflect_into_invertible(Eigen::VectorXd& theta) {
  auto roots = ma_roots(theta);
  bool changed = false;
  for (auto& r : roots) {
    if (std::abs(r) < 1.0 - 1e-12) {
      r = 1.0 / std::conj(r);
      changed = true;
    }
  }
  if (!changed) return false;
  // theta(z) = prod_i (1 - z / r_i)
  std::vector<std::complex<double>> poly{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i] / r;
    }
    poly = std::move(next);
  }
  for (long j = 0; j < theta.size(); ++j) {
    theta[j] = (j + 1 < static_cast<long>(poly.size())) ? poly[j + 1].real() : 0.0;
  }
  return true;
}

struct DesignBundle {
  Eigen::MatrixXd design;  // intercept + feature columns
  Eigen::VectorXd y;
  std::vector<std::string> names;
};

DesignBundle arma_design(const HourlyPanel& panel, const FeatureSpec& base, int p, long t_begin,
                         long t_end) {
  FeatureSpec spec = base;
  spec.n_recent_lags = p;
  spec.standardize = false;
  FeatureMatrix m = build_features(panel, spec, t_begin, t_end);
  DesignBundle b;
  b.design.resize(m.rows(), m.cols() + 1);
  b.design.col(0).setOnes();
  b.design.rightCols(m.cols()) = m.x;
  b.y = std::move(m.y);
  b.names.reserve(m.column_names.size() + 1);
  b.names.push_back("const");
  for (auto& n : m.column_names) b.names.push_back(std::move(n));
  return b;
}

ArmaFit fit_single_order(const HourlyPanel& panel, const FeatureSpec& base, int p, int q,
                         long t_begin, long t_end) {
  const DesignBundle b = arma_design(panel, base, p, t_begin, t_end);
  const long n = b.design.rows();
  if (n <= b.design.cols() + q) {
    throw HistoryError("ARMA window of " + std::to_string(n) + " rows cannot identify " +
                       std::to_string(b.design.cols() + q) + " parameters");
  }

  ArmaFit fit;
  fit.p = p;
  fit.q = q;
  fit.mean_names = b.names;
  fit.n_obs = n;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
  CssState state = css_solve(b.design, b.y, theta);

  if (q > 0) {
    // BFGS over the MA coefficients; inner mean parameters are exact.
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(q, q);
    Eigen::VectorXd grad = css_gradient(theta, state.residual);
    const int max_iter = 500;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
      if (grad.lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, state.css)) break;
      Eigen::VectorXd dir = -h_inv * grad;
      if (dir.dot(grad) >= 0) {
        h_inv.setIdentity();  // reset on a non-descent direction
        dir = -grad;
      }
      // Backtracking Armijo line search.
      double step = 1.0;
      const double slope = grad.dot(dir);
      CssState next_state;
      Eigen::VectorXd next_theta;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        next_theta = theta + step * dir;
        next_state = css_solve(b.design, b.y, next_theta);
        if (next_state.css <= state.css + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // no progress possible at machine precision

      const Eigen::VectorXd next_grad = css_gradient(next_theta, next_state.residual);
      const Eigen::VectorXd s = next_theta - theta;
      const Eigen::VectorXd yv = next_grad - grad;
      const double sy = s.dot(yv);
      if (sy > 1e-12) {
        const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(q, q);
        const Eigen::MatrixXd v = eye - (s * yv.transpose()) / sy;
        h_inv = v * h_inv * v.transpose() + (s * s.transpose()) / sy;
      }
      theta = next_theta;
      state = std::move(next_state);
      grad = next_grad;
    }
    fit.iterations = iter;
    if (iter >= max_iter) {
      std::vector<double> best(theta.data(), theta.data() + theta.size());
      throw ConvergenceError("ARMA estimation hit the 500-iteration cap", best);
    }

    if (reflect_into_invertible(theta)) {
      fit.ma_reflected = true;
      state = css_solve(b.design, b.y, theta);
    }
  }

  fit.theta = theta;
  fit.mean_params = state.psi;
  fit.css = state.css;

  const double k = static_cast<double>(b.design.cols() + q + 1);  // + residual variance
  const double nn = static_cast<double>(n);
  const double css_floor = std::max(state.css, 1e-300);
  fit.aicc = nn * std::log(css_floor / nn) + 2.0 * k + 2.0 * k * (k + 1.0) / (nn - k - 1.0);
  return fit;
}

}  // namespace

Eigen::VectorXd reflect_ma_coefficients(const Eigen::VectorXd& theta, bool* changed) {
  Eigen::VectorXd out = theta;
  const bool moved = reflect_into_invertible(out);
  if (changed) *changed = moved;
  return out;
}

ArmaFit fit_seasonal_arma(const HourlyPanel& panel, const FeatureSpec& base,
                          const ArmaOrder& order, long t_begin, long t_end) {
  order.validate();
  if (!order.select_by_aicc) {
    return fit_single_order(panel, base, order.p, order.q, t_begin, t_end);
  }
  const auto grid = order.effective_grid();
  if (grid.empty()) throw ConfigError("empty AICc grid");
  // All candidates share the rows [t_begin, t_end), so AICc values compare on
  // an identical sample.
  ArmaFit best;
  bool have = false;
  for (const auto& [gp, gq] : grid) {
    ArmaFit cand = fit_single_order(panel, base, gp, gq, t_begin, t_end);
    if (!have || cand.aicc < best.aicc) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

Eigen::VectorXd arma_residuals(const HourlyPanel& panel, const FeatureSpec& base,
                               const ArmaFit& fit, long t_begin, long t_end) {
  const DesignBundle b = arma_design(panel, base, fit.p, t_begin, t_end);
  const Eigen::VectorXd raw = b.y - b.design * fit.mean_params;
  Eigen::VectorXd resid(raw.size());
  ma_filter(fit.theta, raw.data(), resid.data(), raw.size());
  return resid;
}

}  // namespace epf
