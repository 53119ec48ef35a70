#pragma once

#include <cstdint>
#include <vector>

namespace opl {

/// Partition of n observations into K cross-fitting folds whose sizes
/// differ by at most one.
struct FoldAssignment {
  std::vector<int> fold_of;  // length n, values in [0, num_folds)
  int num_folds = 0;

  std::size_t size() const { return fold_of.size(); }
  std::vector<std::size_t> fold_sizes() const;
};

/// Seeded uniformly random permutation chopped into K nearly equal blocks.
/// Throws KOutOfRange unless 2 <= K <= n.
FoldAssignment make_folds(std::size_t n, int num_folds, std::uint64_t seed);

}  // namespace opl
