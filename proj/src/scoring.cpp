#include "opl/scoring.hpp"

#include <string>

#include "opl/errors.hpp"

namespace opl {

ScoreMatrix aipw_scores_from_predictions(const ObservationalDataset& ds,
                                         const Matrix& mu_hat, const Matrix& e_hat) {
  const std::size_t n = ds.size();
  const std::size_t d = static_cast<std::size_t>(ds.num_actions);
  if (mu_hat.rows() != n || mu_hat.cols() != d || e_hat.rows() != n || e_hat.cols() != d) {
    throw DimensionMismatch("nuisance prediction matrices must be n x num_actions");
  }
  ScoreMatrix out{Matrix(n, d)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = static_cast<std::size_t>(ds.actions[i]);
    const double e = e_hat.at(i, a);
    if (e <= 0.0) {
      throw ZeroPropensity("propensity of logged action at row " + std::to_string(i) +
                           " is not positive");
    }
    for (std::size_t j = 0; j < d; ++j) out.values.at(i, j) = mu_hat.at(i, j);
    out.values.at(i, a) += (ds.rewards[i] - mu_hat.at(i, a)) / e;
  }
  return out;
}

ScoreMatrix aipw_scores(const ObservationalDataset& ds, const NuisanceFit& nf) {
  return aipw_scores_from_predictions(ds, nf.cross_fitted_outcomes(ds),
                                      nf.cross_fitted_propensities(ds));
}

ScoreMatrix ipw_scores(const ObservationalDataset& ds, const Matrix& propensities) {
  const std::size_t n = ds.size();
  const std::size_t d = static_cast<std::size_t>(ds.num_actions);
  if (propensities.rows() != n || propensities.cols() != d) {
    throw DimensionMismatch("propensity matrix must be n x num_actions");
  }
  ScoreMatrix out{Matrix(n, d, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = static_cast<std::size_t>(ds.actions[i]);
    const double e = propensities.at(i, a);
    if (e <= 0.0) {
      throw ZeroPropensity("propensity of logged action at row " + std::to_string(i) +
                           " is not positive");
    }
    out.values.at(i, a) = ds.rewards[i] / e;
  }
  return out;
}

double policy_value(const ScoreMatrix& scores, std::span<const int> assignments) {
  if (assignments.size() != scores.size()) {
    throw DimensionMismatch("assignments length must equal score rows");
  }
  if (scores.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    sum += scores.at(i, assignments[i]);
  }
  return sum / static_cast<double>(scores.size());
}

}  // namespace opl
