#include "epf/forest.hpp"

#include <algorithm>
#include <cmath>

#include "epf/errors.hpp"

namespace epf {

std::vector<int> rf_m_try_grid(int p) {
  const int root = static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))));
  std::vector<int> grid;
  for (const int m : {root - 1, root, root + 1}) {
    const int clipped = std::clamp(m, 1, p);
    if (grid.empty() || grid.back() != clipped) grid.push_back(clipped);
  }
  return grid;
}

double Tree::predict(const Eigen::VectorXd& row) const {
  int node = 0;
  while (nodes[node].left >= 0) {
    const auto& n = nodes[node];
    node = (row[n.column] <= n.threshold) ? n.left : n.right;
  }
  return nodes[node].value;
}

double ForestFit::predict(const Eigen::VectorXd& row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return sum / static_cast<double>(trees.size());
}

SplitChoice best_split(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const std::vector<int>& sample, const std::vector<int>& columns) {
  SplitChoice best;
  const long n = static_cast<long>(sample.size());
  if (n < 2) return best;

  double total = 0.0;
  for (const int i : sample) total += y[i];

  std::vector<std::pair<double, double>> vals(n);  // (feature value, target)
  for (const int col : columns) {
    for (long r = 0; r < n; ++r) {
      vals[r] = {x(sample[r], col), y[sample[r]]};
    }
    std::sort(vals.begin(), vals.end());
    // Decrease in SSE = sum_l^2/n_l + sum_r^2/n_r - total^2/n; the last term
    // is constant per node, so maximize the child term.
    const double base = total * total / n;
    double left_sum = 0.0;
    for (long r = 0; r + 1 < n; ++r) {
      left_sum += vals[r].second;
      if (vals[r].first == vals[r + 1].first) continue;
      const double right_sum = total - left_sum;
      const double score =
          left_sum * left_sum / (r + 1) + right_sum * right_sum / (n - r - 1) - base;
      // a split must strictly decrease the node SSE; pure nodes stay leaves
      if (score > 0.0 && (!best.valid || score > best.score)) {
        best.valid = true;
        best.score = score;
        best.column = col;
        best.threshold = 0.5 * (vals[r].first + vals[r + 1].first);
      }
    }
  }
  return best;
}

namespace {

void grow_node(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfConfig& cfg, int m_try,
               Tree& tree, int node_index, std::vector<int>& sample, Rng& rng) {
  const long n = static_cast<long>(sample.size());
  double sum = 0.0;
  for (const int i : sample) sum += y[i];
  tree.nodes[node_index].value = sum / n;

  if (n <= cfg.min_node_size) return;

  // Draw m_try distinct columns; ascending order fixes the tie-break.
  const int p = static_cast<int>(x.cols());
  std::vector<int> cols(p);
  for (int j = 0; j < p; ++j) cols[j] = j;
  for (int j = 0; j < m_try; ++j) {
    const int k = j + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(p - j)));
    std::swap(cols[j], cols[k]);
  }
  cols.resize(m_try);
  std::sort(cols.begin(), cols.end());

  const SplitChoice split = best_split(x, y, sample, cols);
  if (!split.valid) return;

  std::vector<int> left, right;
  left.reserve(sample.size());
  right.reserve(sample.size());
  for (const int i : sample) {
    (x(i, split.column) <= split.threshold ? left : right).push_back(i);
  }
  sample.clear();
  sample.shrink_to_fit();

  auto& node = tree.nodes[node_index];
  node.column = split.column;
  node.threshold = split.threshold;
  node.left = static_cast<int>(tree.nodes.size());
  node.right = node.left + 1;
  tree.nodes.emplace_back();
  tree.nodes.emplace_back();
  grow_node(x, y, cfg, m_try, tree, tree.nodes[node_index].left, left, rng);
  grow_node(x, y, cfg, m_try, tree, tree.nodes[node_index].right, right, rng);
}

}  // namespace

ForestFit fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const RfConfig& cfg,
                     Rng rng) {
  const long n = x.rows();
  const int p = static_cast<int>(x.cols());
  if (n < 1 || p < 1) throw EmptyError("empty design");
  if (x.rows() != y.size()) throw RangeError("design and target row counts differ");
  if (n < cfg.min_node_size) {
    throw HistoryError("forest needs at least min_node_size rows");
  }
  int m_try = cfg.m_try;
  if (m_try == 0) m_try = std::max(1, static_cast<int>(std::floor(std::sqrt(double(p)))));
  if (m_try > p) throw ConfigError("m_try exceeds the column count");
  if (cfg.n_trees < 1) throw ConfigError("n_trees must be >= 1");

  ForestFit fit;
  fit.y_min = y.minCoeff();
  fit.y_max = y.maxCoeff();
  fit.trees.resize(cfg.n_trees);
  for (int b = 0; b < cfg.n_trees; ++b) {
    Rng tree_rng = rng.derive(static_cast<std::uint64_t>(b));
    std::vector<int> sample(n);
    if (cfg.bootstrap) {
      for (long i = 0; i < n; ++i) {
        sample[i] = static_cast<int>(tree_rng.bounded(static_cast<std::uint64_t>(n)));
      }
    } else {
      for (long i = 0; i < n; ++i) sample[i] = static_cast<int>(i);
    }
    Tree& tree = fit.trees[b];
    tree.nodes.emplace_back();
    grow_node(x, y, cfg, m_try, tree, 0, sample, tree_rng);
  }
  return fit;
}

}  // namespace epf
