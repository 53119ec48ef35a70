#include "opl/simulation.hpp"

#include <cstdlib>

#include "opl/rng.hpp"

namespace opl {

int SyntheticTruth::region_of(std::span<const double> x) const {
  const double x5 = x[5];
  const double x7 = x[7];
  const double e1 = (x5 * x5) / (0.6 * 0.6) + (x7 * x7) / (0.35 * 0.35);
  const double e2 = ((x5 - 1.0) * (x5 - 1.0)) / (0.4 * 0.4) +
                    ((x7 - 1.0) * (x7 - 1.0)) / (0.35 * 0.35);
  if (e1 < 1.0 || e2 < 1.0) return 2;
  if (x5 >= 0.0 && x5 < 0.6 && x7 > 0.35 && x7 <= 1.0) return 0;
  return 1;
}

double SyntheticTruth::mean_reward(std::span<const double> x, int action) const {
  switch (region_of(x)) {
    case 0: return 3.0 - action;
    case 1: return 2.0 - std::abs(action - 1) / 2.0;
    default: return 1.5 * (action - 1);
  }
}

std::array<double, 3> SyntheticTruth::propensities(std::span<const double> x) const {
  if (region_of(x) == 2) return {0.4, 0.2, 0.4};
  return {0.2, 0.6, 0.2};
}

int SyntheticTruth::optimal_action(std::span<const double> x) const {
  int best = 0;
  double best_value = mean_reward(x, 0);
  for (int a = 1; a < num_actions; ++a) {
    const double v = mean_reward(x, a);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

std::pair<ObservationalDataset, SyntheticTruth> generate_synthetic(std::size_t n,
                                                                   std::uint64_t seed) {
  SyntheticTruth truth;
  ObservationalDataset ds;
  ds.num_actions = SyntheticTruth::num_actions;
  ds.features = Matrix(n, SyntheticTruth::feature_dim);
  ds.actions.resize(n);
  ds.rewards.resize(n);
  ds.known_propensities = Matrix(n, SyntheticTruth::num_actions);

  Rng rng(derive_seed(seed, "simulation"));
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.features.row(i);
    for (double& v : row) v = rng.uniform01();
    const auto probs = truth.propensities(row);
    const int action = rng.categorical(probs);
    ds.actions[i] = action;
    ds.rewards[i] = truth.mean_reward(row, action) + SyntheticTruth::noise_std * rng.gaussian();
    for (int a = 0; a < SyntheticTruth::num_actions; ++a) {
      ds.known_propensities->at(i, static_cast<std::size_t>(a)) = probs[static_cast<std::size_t>(a)];
    }
  }
  return {std::move(ds), truth};
}

Matrix sample_features(std::size_t n, std::uint64_t seed) {
  Matrix out(n, SyntheticTruth::feature_dim);
  Rng rng(derive_seed(seed, "features"));
  for (double& v : out.data()) v = rng.uniform01();
  return out;
}

}  // namespace opl
