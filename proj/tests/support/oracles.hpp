#pragma once

// Test-only oracles, independent of the library's search implementation:
// the tree optimum is recomputed by naive recursive enumeration over global
// midpoint thresholds with per-subset rescans (no presorting, no merged
// runs, no incremental sums).

#include <cstdint>
#include <vector>

#include "opl/matrix.hpp"
#include "opl/rng.hpp"
#include "opl/scoring.hpp"

namespace opl::testing {

/// Maximum attainable summed score over depth-limited axis-aligned trees.
double brute_force_best_tree(const Matrix& features, const ScoreMatrix& scores, int depth);

struct RandomInstance {
  Matrix features;
  ScoreMatrix scores;
};

/// Random desk-scale instance. Scores are small integers so that every sum
/// is exact in double arithmetic regardless of summation order; roughly
/// half the feature columns are drawn from a coarse grid to exercise
/// duplicate values.
RandomInstance random_instance(Rng& rng, std::size_t max_n, std::size_t max_p, int max_d,
                               std::size_t min_n = 1);

}  // namespace opl::testing
