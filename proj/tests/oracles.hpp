#pragma once

// Independent oracles used by both the unit tests and the acceptance suite.
// Everything here recomputes results by brute force or closed form, never
// through the solver paths it is checking.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epf/forest.hpp"
#include "epf/rng.hpp"

namespace epf::oracles {

inline Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& x, double sigma) {
  const long n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      k(i, j) = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2.0 * sigma * sigma));
    }
  }
  return k;
}

struct SvrOracleResult {
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

// Exhaustive active-set search over the SVR dual: each coefficient is one of
// {0, +C, -C, free-positive, free-negative}; every pattern's KKT system is
// solved and verified. Exact up to solve tolerance; viable for n <= 8.
inline SvrOracleResult exhaustive_svr_oracle(const Eigen::MatrixXd& k, const Eigen::VectorXd& y,
                                             double c, double eps) {
  const long n = y.size();
  const double tol = 1e-7;
  SvrOracleResult best;

  std::vector<int> state(n, 0);
  const long total = static_cast<long>(std::pow(5.0, static_cast<double>(n)));
  for (long code = 0; code < total; ++code) {
    long rest = code;
    for (long i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 5);
      rest /= 5;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    std::vector<long> free;
    std::vector<double> free_sign;
    double bound_sum = 0.0;
    for (long i = 0; i < n; ++i) {
      switch (state[i]) {
        case 1: beta[i] = c; bound_sum += c; break;
        case 2: beta[i] = -c; bound_sum -= c; break;
        case 3: free.push_back(i); free_sign.push_back(1.0); break;
        case 4: free.push_back(i); free_sign.push_back(-1.0); break;
        default: break;
      }
    }
    const long f = static_cast<long>(free.size());
    if (std::abs(bound_sum) > c * f + tol) continue;

    double b = 0.0;
    if (f > 0) {
      Eigen::MatrixXd a(f + 1, f + 1);
      Eigen::VectorXd rhs(f + 1);
      for (long r = 0; r < f; ++r) {
        for (long s = 0; s < f; ++s) a(r, s) = k(free[r], free[s]);
        a(r, f) = 1.0;
        a(f, r) = 1.0;
        double adj = y[free[r]] - eps * free_sign[r];
        for (long i = 0; i < n; ++i) {
          if (beta[i] != 0.0) adj -= k(free[r], i) * beta[i];
        }
        rhs[r] = adj;
      }
      a(f, f) = 0.0;
      rhs[f] = -bound_sum;
      const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
      bool ok = true;
      for (long r = 0; r < f; ++r) {
        const double v = sol[r];
        if (free_sign[r] > 0 && !(v > tol && v < c - tol)) ok = false;
        if (free_sign[r] < 0 && !(v < -tol && v > -c + tol)) ok = false;
        beta[free[r]] = v;
      }
      if (!ok) continue;
      b = sol[f];
    } else if (std::abs(bound_sum) > tol) {
      continue;
    }

    const Eigen::VectorXd h = k * beta;
    if (f == 0) {
      double lb = -std::numeric_limits<double>::infinity();
      double ub = std::numeric_limits<double>::infinity();
      for (long i = 0; i < n; ++i) {
        const double base = y[i] - h[i];
        if (state[i] == 0) {
          lb = std::max(lb, base - eps);
          ub = std::min(ub, base + eps);
        } else if (state[i] == 1) {
          ub = std::min(ub, base - eps);
        } else {
          lb = std::max(lb, base + eps);
        }
      }
      if (lb > ub + tol) continue;
      b = 0.5 * (lb + ub);
    } else {
      bool ok = true;
      for (long i = 0; i < n && ok; ++i) {
        const double base = y[i] - h[i];
        if (state[i] == 0 && std::abs(base - b) > eps + tol) ok = false;
        if (state[i] == 1 && b > base - eps + tol) ok = false;
        if (state[i] == 2 && b < base + eps - tol) ok = false;
      }
      if (!ok) continue;
    }

    const double objective = 0.5 * beta.dot(k * beta) - y.dot(beta) + eps * beta.lpNorm<1>();
    if (objective < best.objective) {
      best.objective = objective;
      best.found = true;
    }
  }
  return best;
}

// Brute-force best split: every (column, midpoint) pair scored by explicit
// partitioning. Same tie-break as the library scan.
inline SplitChoice brute_force_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const std::vector<int>& sample) {
  SplitChoice best;
  const long n = static_cast<long>(sample.size());
  double total = 0.0;
  for (const int i : sample) total += y[i];
  double sse_node = 0.0;
  for (const int i : sample) sse_node += (y[i] - total / n) * (y[i] - total / n);

  for (int col = 0; col < x.cols(); ++col) {
    std::vector<double> values;
    for (const int i : sample) values.push_back(x(i, col));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t v = 0; v + 1 < values.size(); ++v) {
      const double threshold = 0.5 * (values[v] + values[v + 1]);
      double left_sum = 0.0, right_sum = 0.0;
      long left_n = 0, right_n = 0;
      for (const int i : sample) {
        if (x(i, col) <= threshold) {
          left_sum += y[i];
          ++left_n;
        } else {
          right_sum += y[i];
          ++right_n;
        }
      }
      double sse_children = 0.0;
      for (const int i : sample) {
        const double mean = (x(i, col) <= threshold) ? left_sum / left_n : right_sum / right_n;
        sse_children += (y[i] - mean) * (y[i] - mean);
      }
      const double score = sse_node - sse_children;
      if (score > 1e-12 && (!best.valid || score > best.score + 1e-9)) {
        best.valid = true;
        best.score = score;
        best.column = col;
        best.threshold = threshold;
      }
    }
  }
  return best;
}

// Walks a grown tree alongside the brute-force recursion; true when every
// internal node uses the oracle's split.
inline bool tree_matches_oracle(const Tree& tree, int node, const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, const std::vector<int>& sample,
                                int min_node_size) {
  const TreeNode& tn = tree.nodes[node];
  if (static_cast<long>(sample.size()) <= min_node_size) return tn.left < 0;
  const SplitChoice oracle = brute_force_split(x, y, sample);
  if (!oracle.valid) return tn.left < 0;
  if (tn.left < 0) return false;
  if (tn.column != oracle.column) return false;
  if (std::abs(tn.threshold - oracle.threshold) > 1e-12) return false;
  std::vector<int> left, right;
  for (const int i : sample) {
    (x(i, tn.column) <= tn.threshold ? left : right).push_back(i);
  }
  return tree_matches_oracle(tree, tn.left, x, y, left, min_node_size) &&
         tree_matches_oracle(tree, tn.right, x, y, right, min_node_size);
}

// Centered orthonormal columns (QR of a centered Gaussian draw).
inline Eigen::MatrixXd orthonormal_design(Rng& rng, long n, long p) {
  Eigen::MatrixXd raw(n, p);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < p; ++j) raw(i, j) = rng.normal();
  }
  raw.rowwise() -= raw.colwise().mean().eval();
  return Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
         Eigen::MatrixXd::Identity(n, p);
}

}  // namespace epf::oracles
