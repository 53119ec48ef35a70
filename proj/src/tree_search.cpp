#include "opl/tree_search.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>

#include "opl/errors.hpp"
#include "opl/rng.hpp"

namespace opl {

SortedColumns presort(const Matrix& features) {
  SortedColumns sorted;
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  sorted.order.resize(p);
  for (std::size_t m = 0; m < p; ++m) {
    auto& ord = sorted.order[m];
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return features.at(static_cast<std::size_t>(a), m) <
             features.at(static_cast<std::size_t>(b), m);
    });
  }
  return sorted;
}

std::vector<std::size_t> run_starts(const Matrix& features,
                                    const SortedColumns& sorted, int dim) {
  const auto& ord = sorted.order[static_cast<std::size_t>(dim)];
  std::vector<std::size_t> starts;
  for (std::size_t j = 0; j < ord.size(); ++j) {
    if (j == 0 || features.at(static_cast<std::size_t>(ord[j]), static_cast<std::size_t>(dim)) !=
                      features.at(static_cast<std::size_t>(ord[j - 1]), static_cast<std::size_t>(dim))) {
      starts.push_back(j);
    }
  }
  return starts;
}

LeafChoice best_leaf(const ScoreMatrix& scores, std::span<const int> subset) {
  LeafChoice choice;
  if (subset.empty()) return choice;  // vacuous node: value 0, action 0
  const int d = scores.num_actions();
  std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
  for (int i : subset) {
    for (int a = 0; a < d; ++a) sums[static_cast<std::size_t>(a)] += scores.at(static_cast<std::size_t>(i), a);
  }
  choice.value = sums[0];
  choice.action = 0;
  for (int a = 1; a < d; ++a) {
    if (sums[static_cast<std::size_t>(a)] > choice.value) {
      choice.value = sums[static_cast<std::size_t>(a)];
      choice.action = a;
    }
  }
  return choice;
}

namespace {

// Subset of rows held in per-dimension sorted order, so children never
// re-sort: a split partitions every dimension's list stably in O(n p).
struct NodeView {
  std::vector<std::vector<int>> order;  // [dim][rank] -> row index

  std::size_t size() const { return order.empty() ? 0 : order[0].size(); }
};

struct Ctx {
  const Matrix& features;
  const ScoreMatrix& scores;
  int skip = 1;
  std::size_t total_rows = 0;
  std::map<std::pair<int, std::vector<int>>, SearchResult>* memo = nullptr;
  std::size_t recursive_calls = 0;
};

double feature_at(const Ctx& ctx, int row, std::size_t dim) {
  return ctx.features.at(static_cast<std::size_t>(row), dim);
}

// Positions j such that sorted value j differs from value j+1; splitting
// after j separates the subset into [0..j] and [j+1..).
std::vector<int> boundary_positions(const Ctx& ctx, const NodeView& node, std::size_t dim) {
  const auto& ord = node.order[dim];
  std::vector<int> bounds;
  for (std::size_t j = 0; j + 1 < ord.size(); ++j) {
    if (feature_at(ctx, ord[j], dim) != feature_at(ctx, ord[j + 1], dim)) {
      bounds.push_back(static_cast<int>(j));
    }
  }
  return bounds;
}

// Balanced subdivision order of [0, count): midpoint first, then the
// midpoints of the halves, breadth first. Prefixes of this sequence are
// nested and roughly equally spaced, which keeps the attained objective
// monotone in the skip parameter.
void subdivision_order(int count, std::vector<int>& out) {
  out.clear();
  if (count <= 0) return;
  std::vector<std::pair<int, int>> queue;
  queue.emplace_back(0, count);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [lo, hi] = queue[head];
    if (lo >= hi) continue;
    const int mid = lo + (hi - lo) / 2;
    out.push_back(mid);
    queue.emplace_back(lo, mid);
    queue.emplace_back(mid + 1, hi);
  }
}

// Split candidates actually searched at a node of `points` rows: all
// boundaries when skip = 1, otherwise the first ceil(points/skip) - 1
// boundaries in subdivision order.
std::vector<int> select_candidates(const std::vector<int>& bounds,
                                   std::size_t points, int skip) {
  if (skip <= 1 || bounds.empty()) return bounds;
  const std::size_t budget =
      (points + static_cast<std::size_t>(skip) - 1) / static_cast<std::size_t>(skip);
  const std::size_t take = budget == 0 ? 0 : budget - 1;
  if (take >= bounds.size()) return bounds;
  std::vector<int> priority;
  subdivision_order(static_cast<int>(bounds.size()), priority);
  std::vector<int> chosen;
  chosen.reserve(take);
  for (std::size_t t = 0; t < take; ++t) {
    chosen.push_back(bounds[static_cast<std::size_t>(priority[t])]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

NodeView root_node(const SortedColumns& sorted) {
  NodeView node;
  node.order = sorted.order;
  return node;
}

std::pair<NodeView, NodeView> partition(const Ctx& ctx, const NodeView& node,
                                        std::size_t dim, int pos) {
  std::vector<std::uint8_t> left_mask(ctx.total_rows, 0);
  const auto& ord = node.order[dim];
  for (int j = 0; j <= pos; ++j) left_mask[static_cast<std::size_t>(ord[static_cast<std::size_t>(j)])] = 1;

  const std::size_t p = node.order.size();
  NodeView left, right;
  left.order.resize(p);
  right.order.resize(p);
  const std::size_t left_count = static_cast<std::size_t>(pos) + 1;
  for (std::size_t m = 0; m < p; ++m) {
    left.order[m].reserve(left_count);
    right.order[m].reserve(node.size() - left_count);
    for (int row : node.order[m]) {
      if (left_mask[static_cast<std::size_t>(row)]) {
        left.order[m].push_back(row);
      } else {
        right.order[m].push_back(row);
      }
    }
  }
  return {std::move(left), std::move(right)};
}

LeafChoice node_best_leaf(const Ctx& ctx, const NodeView& node) {
  if (node.size() == 0) return LeafChoice{};
  return best_leaf(ctx.scores, node.order[0]);
}

struct SplitChoice {
  double value;
  std::size_t dim;
  int pos;          // boundary position within the node's sorted order
  double split_value;
  int left_action;  // only meaningful for the depth-2 sweep
  int right_action;
};

// Lexicographic preference: larger value, then smaller dimension, split
// value and actions. Unique per candidate, so any evaluation order (or a
// parallel partition of candidates) reduces to the same winner.
bool better(const SplitChoice& a, const SplitChoice& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  if (a.split_value != b.split_value) return a.split_value < b.split_value;
  if (a.left_action != b.left_action) return a.left_action < b.left_action;
  return a.right_action < b.right_action;
}

double midpoint(const Ctx& ctx, const NodeView& node, std::size_t dim, int pos) {
  const auto& ord = node.order[dim];
  return 0.5 * (feature_at(ctx, ord[static_cast<std::size_t>(pos)], dim) +
                feature_at(ctx, ord[static_cast<std::size_t>(pos) + 1], dim));
}

// Collapsed depth-2 solve: one sweep per dimension maintaining running
// left-side per-action sums; the right side is totals minus left.
std::optional<SplitChoice> depth2_best_split(const Ctx& ctx, const NodeView& node) {
  const std::size_t m_points = node.size();
  const int d = ctx.scores.num_actions();
  std::vector<double> totals(static_cast<std::size_t>(d), 0.0);
  for (int row : node.order[0]) {
    for (int a = 0; a < d; ++a) totals[static_cast<std::size_t>(a)] += ctx.scores.at(static_cast<std::size_t>(row), a);
  }

  std::optional<SplitChoice> best;
  std::vector<double> left(static_cast<std::size_t>(d));
  for (std::size_t dim = 0; dim < node.order.size(); ++dim) {
    const auto bounds = boundary_positions(ctx, node, dim);
    const auto selected = select_candidates(bounds, m_points, ctx.skip);
    if (selected.empty()) continue;
    std::fill(left.begin(), left.end(), 0.0);
    const auto& ord = node.order[dim];
    std::size_t cursor = 0;
    for (int j = 0; j + 1 < static_cast<int>(m_points) && cursor < selected.size(); ++j) {
      const int row = ord[static_cast<std::size_t>(j)];
      for (int a = 0; a < d; ++a) left[static_cast<std::size_t>(a)] += ctx.scores.at(static_cast<std::size_t>(row), a);
      if (j != selected[cursor]) continue;
      ++cursor;
      int best_l = 0, best_r = 0;
      double lv = left[0], rv = totals[0] - left[0];
      for (int a = 1; a < d; ++a) {
        const double la = left[static_cast<std::size_t>(a)];
        const double ra = totals[static_cast<std::size_t>(a)] - la;
        if (la > lv) { lv = la; best_l = a; }
        if (ra > rv) { rv = ra; best_r = a; }
      }
      SplitChoice cand{lv + rv, dim, j, midpoint(ctx, node, dim, j), best_l, best_r};
      if (!best || better(cand, *best)) best = cand;
    }
  }
  return best;
}

SearchResult solve(Ctx& ctx, const NodeView& node, int depth);

SearchResult solve_deep(Ctx& ctx, const NodeView& node, int depth) {
  std::optional<SplitChoice> best;
  SearchResult best_left_tree, best_right_tree;
  for (std::size_t dim = 0; dim < node.order.size(); ++dim) {
    const auto bounds = boundary_positions(ctx, node, dim);
    const auto selected = select_candidates(bounds, node.size(), ctx.skip);
    for (int pos : selected) {
      auto [left, right] = partition(ctx, node, dim, pos);
      SearchResult lr = solve(ctx, left, depth - 1);
      SearchResult rr = solve(ctx, right, depth - 1);
      SplitChoice cand{lr.value + rr.value, dim, pos, midpoint(ctx, node, dim, pos), 0, 0};
      if (!best || better(cand, *best)) {
        best = cand;
        best_left_tree = std::move(lr);
        best_right_tree = std::move(rr);
      }
    }
  }
  if (!best) {
    const LeafChoice leaf = node_best_leaf(ctx, node);
    return {leaf.value, TreePolicy::leaf(leaf.action)};
  }
  return {best->value,
          TreePolicy::branch(static_cast<int>(best->dim), best->split_value,
                             best_left_tree.tree, best_right_tree.tree)};
}

SearchResult solve(Ctx& ctx, const NodeView& node, int depth) {
  ++ctx.recursive_calls;
  if (node.size() == 0) return {0.0, TreePolicy::leaf(0)};
  if (depth <= 1 || node.size() == 1) {
    const LeafChoice leaf = node_best_leaf(ctx, node);
    return {leaf.value, TreePolicy::leaf(leaf.action)};
  }

  std::pair<int, std::vector<int>> key;
  if (ctx.memo) {
    key = {depth, node.order[0]};
    auto it = ctx.memo->find(key);
    if (it != ctx.memo->end()) return it->second;
  }

  SearchResult result;
  if (depth == 2) {
    const auto best = depth2_best_split(ctx, node);
    if (!best) {
      const LeafChoice leaf = node_best_leaf(ctx, node);
      result = {leaf.value, TreePolicy::leaf(leaf.action)};
    } else {
      result = {best->value,
                TreePolicy::branch(static_cast<int>(best->dim), best->split_value,
                                   TreePolicy::leaf(best->left_action),
                                   TreePolicy::leaf(best->right_action))};
    }
  } else {
    result = solve_deep(ctx, node, depth);
  }

  if (ctx.memo) (*ctx.memo)[std::move(key)] = result;
  return result;
}

// Root-level parallel variant: the (dimension, candidate) pairs are
// partitioned across workers and each chunk is reduced with the same
// comparator, then chunks are merged in order, reproducing the sequential
// winner exactly.
SearchResult solve_root_parallel(const Ctx& base, const NodeView& node, int depth,
                                 int threads, std::size_t& calls_out) {
  struct RootCandidate {
    std::size_t dim;
    int pos;
  };
  std::vector<RootCandidate> candidates;
  for (std::size_t dim = 0; dim < node.order.size(); ++dim) {
    const auto bounds = boundary_positions(base, node, dim);
    for (int pos : select_candidates(bounds, node.size(), base.skip)) {
      candidates.push_back({dim, pos});
    }
  }
  if (candidates.empty()) {
    const LeafChoice leaf = best_leaf(base.scores, node.order[0]);
    calls_out += 1;
    return {leaf.value, TreePolicy::leaf(leaf.action)};
  }

  const std::size_t workers = std::min<std::size_t>(
      candidates.size(),
      threads > 0 ? static_cast<std::size_t>(threads)
                  : std::max(1u, std::thread::hardware_concurrency()));
  struct ChunkBest {
    bool has = false;
    SplitChoice choice{};
    SearchResult left, right;
    std::size_t calls = 0;
  };
  std::vector<ChunkBest> chunk_best(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (candidates.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      Ctx ctx{base.features, base.scores, base.skip, base.total_rows, nullptr, 0};
      ChunkBest local;
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(candidates.size(), lo + chunk);
      for (std::size_t t = lo; t < hi; ++t) {
        const auto [dim, pos] = candidates[t];
        auto [left, right] = partition(ctx, node, dim, pos);
        SearchResult lr = solve(ctx, left, depth - 1);
        SearchResult rr = solve(ctx, right, depth - 1);
        SplitChoice cand{lr.value + rr.value, dim, pos, midpoint(ctx, node, dim, pos), 0, 0};
        if (!local.has || better(cand, local.choice)) {
          local.has = true;
          local.choice = cand;
          local.left = std::move(lr);
          local.right = std::move(rr);
        }
      }
      local.calls = ctx.recursive_calls;
      chunk_best[w] = std::move(local);
    });
  }
  for (auto& t : pool) t.join();

  const ChunkBest* winner = nullptr;
  for (const auto& cb : chunk_best) {
    calls_out += cb.calls;
    if (!cb.has) continue;
    if (!winner || better(cb.choice, winner->choice)) winner = &cb;
  }
  calls_out += 1;  // the root itself
  return {winner->choice.value,
          TreePolicy::branch(static_cast<int>(winner->choice.dim), winner->choice.split_value,
                             winner->left.tree, winner->right.tree)};
}

void check_inputs(const Matrix& features, const ScoreMatrix& scores, int depth, int skip) {
  if (features.rows() == 0) throw EmptyPointSet("tree search needs at least one row");
  if (features.rows() != scores.size()) {
    throw DimensionMismatch("features and scores must have the same number of rows");
  }
  if (depth < 1) throw ParameterOutOfRange("depth must be >= 1");
  if (skip < 1) throw ParameterOutOfRange("skip must be >= 1");
}

}  // namespace

SearchResult depth2_solve(const Matrix& features, const ScoreMatrix& scores,
                          const SortedColumns& sorted, int skip) {
  check_inputs(features, scores, 2, skip);
  Ctx ctx{features, scores, skip, features.rows(), nullptr, 0};
  NodeView node = root_node(sorted);
  return solve(ctx, node, 2);
}

SearchResult search_tree(const Matrix& features, const ScoreMatrix& scores,
                         const SearchConfig& config, SearchStats* stats) {
  check_inputs(features, scores, config.depth, config.skip);
  const SortedColumns sorted = presort(features);
  NodeView node = root_node(sorted);

  std::map<std::pair<int, std::vector<int>>, SearchResult> memo;
  Ctx ctx{features, scores, config.skip, features.rows(),
          config.memoize ? &memo : nullptr, 0};

  SearchResult result;
  if (config.parallel_root && config.depth >= 3 && config.threads != 1) {
    std::size_t calls = 0;
    result = solve_root_parallel(ctx, node, config.depth, config.threads, calls);
    ctx.recursive_calls = calls;
  } else {
    result = solve(ctx, node, config.depth);
  }
  if (stats) stats->recursive_calls = ctx.recursive_calls;
  return result;
}

SearchResult greedy_tree(const Matrix& features, const ScoreMatrix& scores, int depth) {
  check_inputs(features, scores, depth, 1);
  const SortedColumns sorted = presort(features);
  Ctx ctx{features, scores, 1, features.rows(), nullptr, 0};

  // Recursive assembly: the split at each node comes from the depth-2
  // criterion on that node's subset.
  auto build = [&](auto&& self, const NodeView& node, int level) -> TreePolicy {
    if (node.size() == 0) return TreePolicy::leaf(0);
    if (level <= 1) return TreePolicy::leaf(node_best_leaf(ctx, node).action);
    const auto best = depth2_best_split(ctx, node);
    if (!best) return TreePolicy::leaf(node_best_leaf(ctx, node).action);
    if (level == 2) {
      return TreePolicy::branch(static_cast<int>(best->dim), best->split_value,
                                TreePolicy::leaf(best->left_action),
                                TreePolicy::leaf(best->right_action));
    }
    auto [left, right] = partition(ctx, node, best->dim, best->pos);
    return TreePolicy::branch(static_cast<int>(best->dim), best->split_value,
                              self(self, left, level - 1), self(self, right, level - 1));
  };
  NodeView node = root_node(sorted);
  TreePolicy tree = build(build, node, depth);

  double value = 0.0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    value += scores.at(i, tree.assign(features.row(i)));
  }
  return {value, std::move(tree)};
}

FitResult caipwl_fit(const ObservationalDataset& ds, int num_folds, std::uint64_t seed,
                     const NuisanceConfig& nuisance_config, const SearchConfig& search_config) {
  const NuisanceFit nf = fit_cross_fitted_nuisances(ds, num_folds, seed, nuisance_config);
  ScoreMatrix scores = aipw_scores(ds, nf);
  SearchResult res = search_tree(ds.features, scores, search_config);
  return {std::move(res.tree), res.value, std::move(scores)};
}

FitResult ipwl_fit(const ObservationalDataset& ds, int num_folds, std::uint64_t seed,
                   const NuisanceConfig& nuisance_config, const SearchConfig& search_config) {
  Matrix propensities;
  if (ds.known_propensities) {
    propensities = *ds.known_propensities;
    const double eta = nuisance_config.eta_floor.value_or(0.0);
    if (eta > 0.0) {
      for (double& v : propensities.data()) v = std::max(v, eta);
    }
  } else {
    const double eta = nuisance_config.eta_floor.value_or(0.1);
    const FoldAssignment folds = make_folds(ds.size(), num_folds, derive_seed(seed, "folds"));
    std::vector<MultiLogitModel> models;
    models.reserve(static_cast<std::size_t>(num_folds));
    for (int k = 0; k < num_folds; ++k) {
      models.push_back(fit_propensity_multilogit(ds, k, folds, nuisance_config.logit));
    }
    propensities = Matrix(ds.size(), static_cast<std::size_t>(ds.num_actions));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto probs = clip_propensities(
          models[static_cast<std::size_t>(folds.fold_of[i])].predict(ds.features.row(i)), eta);
      for (int a = 0; a < ds.num_actions; ++a) {
        propensities.at(i, static_cast<std::size_t>(a)) = probs[static_cast<std::size_t>(a)];
      }
    }
  }
  ScoreMatrix scores = ipw_scores(ds, propensities);
  SearchResult res = search_tree(ds.features, scores, search_config);
  return {std::move(res.tree), res.value, std::move(scores)};
}

}  // namespace opl
