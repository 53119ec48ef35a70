#include "opl/folds.hpp"

#include <numeric>
#include <string>

#include "opl/errors.hpp"
#include "opl/rng.hpp"

namespace opl {

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(num_folds), 0);
  for (int f : fold_of) sizes[static_cast<std::size_t>(f)]++;
  return sizes;
}

FoldAssignment make_folds(std::size_t n, int num_folds, std::uint64_t seed) {
  if (num_folds < 2 || static_cast<std::size_t>(num_folds) > n) {
    throw KOutOfRange("fold count " + std::to_string(num_folds) +
                      " outside [2, n=" + std::to_string(n) + "]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  // Fisher-Yates with explicit draws; std::shuffle is implementation-defined.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    std::swap(perm[i - 1], perm[j]);
  }

  FoldAssignment folds;
  folds.num_folds = num_folds;
  folds.fold_of.assign(n, 0);
  const std::size_t base = n / static_cast<std::size_t>(num_folds);
  const std::size_t remainder = n % static_cast<std::size_t>(num_folds);
  std::size_t pos = 0;
  for (int k = 0; k < num_folds; ++k) {
    const std::size_t block = base + (static_cast<std::size_t>(k) < remainder ? 1 : 0);
    for (std::size_t t = 0; t < block; ++t) {
      folds.fold_of[perm[pos++]] = k;
    }
  }
  return folds;
}

}  // namespace opl
