#pragma once

#include <span>

#include "opl/dataset.hpp"
#include "opl/matrix.hpp"
#include "opl/nuisance.hpp"

namespace opl {

/// n x d matrix of per-observation, per-action policy scores. Row i holds
/// the score vector whose entry at a policy's chosen action contributes to
/// the policy value estimate.
struct ScoreMatrix {
  Matrix values;

  std::size_t size() const { return values.rows(); }
  int num_actions() const { return static_cast<int>(values.cols()); }
  double at(std::size_t i, int a) const { return values.at(i, static_cast<std::size_t>(a)); }
};

/// Doubly robust scores: row i is the cross-fitted outcome prediction for
/// every arm plus the propensity-weighted residual added on the logged arm.
ScoreMatrix aipw_scores(const ObservationalDataset& ds, const NuisanceFit& nf);

/// Same construction from externally supplied per-observation predictions
/// (mu_hat and e_hat are n x d).
ScoreMatrix aipw_scores_from_predictions(const ObservationalDataset& ds,
                                         const Matrix& mu_hat, const Matrix& e_hat);

/// Inverse-propensity scores: reward over propensity on the logged arm,
/// zero elsewhere. Throws ZeroPropensity if the logged arm's propensity
/// is not positive.
ScoreMatrix ipw_scores(const ObservationalDataset& ds, const Matrix& propensities);

/// Mean over observations of scores[i][assignments[i]].
double policy_value(const ScoreMatrix& scores, std::span<const int> assignments);

}  // namespace opl
