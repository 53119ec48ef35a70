#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "opl/matrix.hpp"
#include "opl/nuisance.hpp"
#include "opl/scoring.hpp"
#include "opl/tree.hpp"

namespace opl {

/// Controls the tree search. `depth` counts layers including leaves, so
/// depth 1 is a single leaf. `skip` is the approximation knob: 1 searches
/// every split point between distinct sorted values (exact); larger values
/// search roughly every skip-th point. Candidate sets shrink monotonically
/// as `skip` grows, so the attained objective is non-increasing in it.
struct SearchConfig {
  int depth = 3;
  int skip = 1;
  bool parallel_root = false;
  int threads = 0;       // 0 = hardware concurrency; caps root-level workers
  bool memoize = false;  // cache subproblem solutions keyed by (subset, depth)
};

struct SearchStats {
  std::size_t recursive_calls = 0;  // invocations of the node solver
};

/// Per-dimension stable ascending sort of all rows, computed once up front;
/// recursive calls restrict these index lists instead of re-sorting.
struct SortedColumns {
  std::vector<std::vector<int>> order;  // [dim][rank] -> row index

  std::size_t dims() const { return order.size(); }
  std::size_t size() const { return order.empty() ? 0 : order[0].size(); }
};

SortedColumns presort(const Matrix& features);

/// Start positions of the equal-value runs of one sorted column.
std::vector<std::size_t> run_starts(const Matrix& features,
                                    const SortedColumns& sorted, int dim);

struct LeafChoice {
  double value = 0.0;  // summed score of the best action over the subset
  int action = 0;      // smallest index among ties; 0 for an empty subset
};

/// Best single action for a subset of rows (column sums of the scores).
LeafChoice best_leaf(const ScoreMatrix& scores, std::span<const int> subset);

struct SearchResult {
  double value = 0.0;  // total score sum attained by the tree
  TreePolicy tree = TreePolicy::leaf(0);
};

/// Depth-2 subproblem: jointly picks one split and both leaf actions by a
/// single sweep per dimension over running per-action score sums. Exact for
/// skip = 1. Returns the best leaf alone when no dimension admits a split.
SearchResult depth2_solve(const Matrix& features, const ScoreMatrix& scores,
                          const SortedColumns& sorted, int skip = 1);

/// Exhaustive (skip = 1) or skip-approximate search over depth-limited
/// trees, maximizing the summed score of the assigned actions. Ties are
/// broken toward smaller split dimension, then smaller split value, then
/// smaller leaf actions, so results are deterministic, including under
/// parallel_root.
SearchResult search_tree(const Matrix& features, const ScoreMatrix& scores,
                         const SearchConfig& config, SearchStats* stats = nullptr);

/// Greedy baseline: each branch takes the depth-2 optimal split for its
/// subset, then recurses. The returned value is recomputed from the
/// assembled tree.
SearchResult greedy_tree(const Matrix& features, const ScoreMatrix& scores, int depth);

struct FitResult {
  TreePolicy tree = TreePolicy::leaf(0);
  double value = 0.0;  // total score sum over the training set
  ScoreMatrix scores;
};

/// Full doubly robust pipeline: cross-fitted nuisances, AIPW scores, tree
/// search.
FitResult caipwl_fit(const ObservationalDataset& ds, int num_folds, std::uint64_t seed,
                     const NuisanceConfig& nuisance_config, const SearchConfig& search_config);

/// Inverse-propensity counterpart; known propensities are used when the
/// dataset carries them, otherwise cross-fitted multinomial logit.
FitResult ipwl_fit(const ObservationalDataset& ds, int num_folds, std::uint64_t seed,
                   const NuisanceConfig& nuisance_config, const SearchConfig& search_config);

}  // namespace opl
