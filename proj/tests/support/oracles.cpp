#include "support/oracles.hpp"

#include <algorithm>
#include <limits>

namespace opl::testing {

namespace {

double best_leaf_sum(const Matrix& scores, const std::vector<std::size_t>& subset) {
  if (subset.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < scores.cols(); ++a) {
    double sum = 0.0;
    for (std::size_t i : subset) sum += scores.at(i, a);
    best = std::max(best, sum);
  }
  return best;
}

double enumerate(const Matrix& features, const Matrix& scores,
                 const std::vector<std::vector<double>>& thresholds,
                 const std::vector<std::size_t>& subset, int depth) {
  double best = best_leaf_sum(scores, subset);
  if (depth <= 1 || subset.size() <= 1) return best;
  for (std::size_t dim = 0; dim < features.cols(); ++dim) {
    for (double thr : thresholds[dim]) {
      std::vector<std::size_t> left, right;
      for (std::size_t i : subset) {
        (features.at(i, dim) < thr ? left : right).push_back(i);
      }
      if (left.empty() || right.empty()) continue;
      best = std::max(best, enumerate(features, scores, thresholds, left, depth - 1) +
                                enumerate(features, scores, thresholds, right, depth - 1));
    }
  }
  return best;
}

}  // namespace

double brute_force_best_tree(const Matrix& features, const ScoreMatrix& scores, int depth) {
  std::vector<std::vector<double>> thresholds(features.cols());
  for (std::size_t dim = 0; dim < features.cols(); ++dim) {
    std::vector<double> column(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) column[i] = features.at(i, dim);
    std::sort(column.begin(), column.end());
    column.erase(std::unique(column.begin(), column.end()), column.end());
    for (std::size_t t = 0; t + 1 < column.size(); ++t) {
      thresholds[dim].push_back(0.5 * (column[t] + column[t + 1]));
    }
  }
  std::vector<std::size_t> all(features.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return enumerate(features, scores.values, thresholds, all, depth);
}

RandomInstance random_instance(Rng& rng, std::size_t max_n, std::size_t max_p, int max_d,
                               std::size_t min_n) {
  const std::size_t n = min_n + rng.uniform_below(max_n - min_n + 1);
  const std::size_t p = 1 + rng.uniform_below(max_p);
  const int d = 2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_d - 1)));

  RandomInstance inst;
  inst.features = Matrix(n, p);
  for (std::size_t q = 0; q < p; ++q) {
    const bool coarse = rng.uniform01() < 0.5;
    for (std::size_t i = 0; i < n; ++i) {
      inst.features.at(i, q) = coarse
                                   ? 0.125 * static_cast<double>(rng.uniform_below(9))
                                   : rng.uniform01();
    }
  }
  inst.scores.values = Matrix(n, static_cast<std::size_t>(d));
  for (double& v : inst.scores.values.data()) {
    v = static_cast<double>(static_cast<int>(rng.uniform_below(9)) - 4);
  }
  return inst;
}

}  // namespace opl::testing
