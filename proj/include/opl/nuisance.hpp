#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "opl/dataset.hpp"
#include "opl/folds.hpp"
#include "opl/matrix.hpp"

namespace opl {

struct MultiLogitConfig {
  double l2 = 1e-4;      // ridge penalty on weights; the intercept is unpenalized
  int max_iter = 10000;
  double tol = 1e-8;     // infinity norm of the gradient at convergence
};

/// Multinomial logistic propensity model fitted by full-batch gradient
/// ascent with backtracking line search on the L2-penalized log-likelihood.
class MultiLogitModel {
 public:
  MultiLogitModel() = default;
  MultiLogitModel(Matrix weights, std::vector<double> intercepts,
                  bool converged, int iterations, std::vector<std::size_t> train_idx)
      : weights_(std::move(weights)), intercepts_(std::move(intercepts)),
        converged_(converged), iterations_(iterations),
        training_indices_(std::move(train_idx)) {}

  /// Softmax probabilities for one feature vector; entries sum to 1.
  std::vector<double> predict(std::span<const double> x) const;

  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }
  const Matrix& weights() const { return weights_; }
  const std::vector<std::size_t>& training_indices() const { return training_indices_; }

 private:
  Matrix weights_;                 // d x p
  std::vector<double> intercepts_; // d
  bool converged_ = false;
  int iterations_ = 0;
  std::vector<std::size_t> training_indices_;
};

/// Fits on every observation outside `exclude_fold`. Throws
/// MissingArmInTrainingFolds if some action never occurs there.
MultiLogitModel fit_propensity_multilogit(const ObservationalDataset& ds,
                                          int exclude_fold,
                                          const FoldAssignment& folds,
                                          const MultiLogitConfig& config = {});

struct KnnConfig {
  int k_neighbors = 0;  // 0 = auto: ceil(sqrt(training count for the arm))
};

/// k-nearest-neighbor regression of reward on features for a single arm.
/// Neighbor order on distance ties is by training index, which makes
/// predictions deterministic.
class KnnOutcomeModel {
 public:
  KnnOutcomeModel() = default;
  KnnOutcomeModel(Matrix points, std::vector<double> targets, int k,
                  std::vector<std::size_t> train_idx)
      : points_(std::move(points)), targets_(std::move(targets)), k_(k),
        training_indices_(std::move(train_idx)) {}

  double predict(std::span<const double> x) const;

  int k_neighbors() const { return k_; }
  const std::vector<std::size_t>& training_indices() const { return training_indices_; }

 private:
  Matrix points_;
  std::vector<double> targets_;
  int k_ = 1;
  std::vector<std::size_t> training_indices_;
};

KnnOutcomeModel fit_outcome_knn(const ObservationalDataset& ds,
                                int exclude_fold, int arm,
                                const FoldAssignment& folds,
                                const KnnConfig& config = {});

/// Entrywise max(p, eta), not renormalized; only the logged-action
/// denominator is consumed downstream. Throws EtaOutOfRange unless
/// 0 < eta <= 1/d (eta = 0 is accepted and is a no-op).
std::vector<double> clip_propensities(std::vector<double> p, double eta);

struct NuisanceConfig {
  MultiLogitConfig logit;
  KnnConfig knn;
  /// Clipping floor for propensities. Default: 0.1 when propensities are
  /// estimated, 0 (no clipping) when the dataset carries known propensities.
  std::optional<double> eta_floor;
};

/// K-fold cross-fitted nuisance models: fold k's models never saw fold k.
/// When the dataset carries known propensities those are used directly
/// (clipped) and no propensity model is fitted.
class NuisanceFit {
 public:
  int num_folds() const { return folds_.num_folds; }
  int num_actions() const { return num_actions_; }
  const FoldAssignment& folds() const { return folds_; }
  double eta_floor() const { return eta_floor_; }
  bool propensities_known() const { return propensities_known_; }

  const MultiLogitModel& propensity_model(int fold) const;
  const KnnOutcomeModel& outcome_model(int fold, int arm) const;

  /// Clipped propensity vector for arbitrary x under fold k's model.
  /// Only available when propensities were estimated.
  std::vector<double> predict_propensity(int fold, std::span<const double> x) const;
  double predict_outcome(int fold, int arm, std::span<const double> x) const;

  /// n x d matrices of per-observation cross-fitted predictions: row i comes
  /// from the models that excluded i's fold (or the clipped known row).
  Matrix cross_fitted_outcomes(const ObservationalDataset& ds) const;
  Matrix cross_fitted_propensities(const ObservationalDataset& ds) const;

  friend NuisanceFit fit_cross_fitted_nuisances(const ObservationalDataset& ds,
                                                int num_folds, std::uint64_t seed,
                                                const NuisanceConfig& config);

 private:
  FoldAssignment folds_;
  int num_actions_ = 0;
  double eta_floor_ = 0.0;
  bool propensities_known_ = false;
  Matrix clipped_known_;                                  // set when known
  std::vector<MultiLogitModel> propensity_models_;        // size K when estimated
  std::vector<std::vector<KnnOutcomeModel>> outcome_models_;  // [K][d]
};

NuisanceFit fit_cross_fitted_nuisances(const ObservationalDataset& ds,
                                       int num_folds, std::uint64_t seed,
                                       const NuisanceConfig& config = {});

}  // namespace opl
