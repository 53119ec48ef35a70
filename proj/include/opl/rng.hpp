#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace opl {

/// Deterministic random source. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); every derived draw below is computed
/// by explicit arithmetic rather than std::*_distribution, whose output is
/// implementation-defined. Gaussians use the Marsaglia polar method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal deviate; the spare from the polar method is cached.
  double gaussian();

  /// Index sampled from a discrete distribution by inverse CDF on one
  /// uniform draw. Probabilities are assumed to sum to ~1.
  int categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable 64-bit seed derivation so each consumer of randomness gets an
/// independent, reproducible stream: mixes a base seed with a stream tag
/// (and an optional index) through FNV-1a and splitmix64 finalization.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index);

}  // namespace opl
