#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "opl/dataset.hpp"
#include "opl/matrix.hpp"

namespace opl {

/// Fixed synthetic data-generating process on [0,1]^10 with three actions.
/// Two coordinates (x5, x7) carve the cube into three regions; the logging
/// policy and the mean rewards are region functions and the reward noise is
/// Gaussian with variance 4. The pointwise optimal action equals the region
/// index.
struct SyntheticTruth {
  static constexpr int feature_dim = 10;
  static constexpr int num_actions = 3;
  static constexpr double noise_std = 2.0;

  /// Region 2 is the union of two open ellipses; region 0 the remaining
  /// part of the box 0 <= x5 < 0.6, 0.35 < x7 <= 1; region 1 the rest.
  /// The ellipse test takes precedence, then the box.
  int region_of(std::span<const double> x) const;

  double mean_reward(std::span<const double> x, int action) const;

  std::array<double, 3> propensities(std::span<const double> x) const;

  int optimal_action(std::span<const double> x) const;
};

/// Draws n logged observations from the synthetic process, with the true
/// propensity rows attached. Bit-reproducible for a fixed seed.
std::pair<ObservationalDataset, SyntheticTruth> generate_synthetic(std::size_t n,
                                                                   std::uint64_t seed);

/// Feature-only draws from the same marginal, for evaluation sets.
Matrix sample_features(std::size_t n, std::uint64_t seed);

}  // namespace opl
