#include "opl/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "opl/errors.hpp"
#include "opl/rng.hpp"

namespace opl {

namespace {

std::vector<std::size_t> training_rows(const FoldAssignment& folds, int exclude_fold) {
  std::vector<std::size_t> rows;
  rows.reserve(folds.size());
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds.fold_of[i] != exclude_fold) rows.push_back(i);
  }
  return rows;
}

void softmax_inplace(std::vector<double>& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

}  // namespace

std::vector<double> MultiLogitModel::predict(std::span<const double> x) const {
  const std::size_t d = intercepts_.size();
  std::vector<double> logits(d);
  for (std::size_t j = 0; j < d; ++j) {
    double z = intercepts_[j];
    for (std::size_t q = 0; q < weights_.cols(); ++q) {
      z += weights_.at(j, q) * x[q];
    }
    logits[j] = z;
  }
  softmax_inplace(logits);
  return logits;
}

MultiLogitModel fit_propensity_multilogit(const ObservationalDataset& ds,
                                          int exclude_fold,
                                          const FoldAssignment& folds,
                                          const MultiLogitConfig& config) {
  const auto rows = training_rows(folds, exclude_fold);
  const std::size_t p = ds.feature_dim();
  const std::size_t d = static_cast<std::size_t>(ds.num_actions);

  std::vector<std::size_t> arm_counts(d, 0);
  for (std::size_t i : rows) arm_counts[static_cast<std::size_t>(ds.actions[i])]++;
  for (std::size_t j = 0; j < d; ++j) {
    if (arm_counts[j] == 0) {
      throw MissingArmInTrainingFolds("action " + std::to_string(j) +
                                      " never observed outside fold " +
                                      std::to_string(exclude_fold));
    }
  }

  Matrix weights(d, p, 0.0);
  std::vector<double> intercepts(d, 0.0);

  // Penalized log-likelihood and its gradient at the current parameters.
  auto objective = [&](const Matrix& w, const std::vector<double>& b) {
    double ll = 0.0;
    std::vector<double> logits(d);
    for (std::size_t i : rows) {
      const auto x = ds.features.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        double z = b[j];
        for (std::size_t q = 0; q < p; ++q) z += w.at(j, q) * x[q];
        logits[j] = z;
      }
      const double m = *std::max_element(logits.begin(), logits.end());
      double lse = 0.0;
      for (double z : logits) lse += std::exp(z - m);
      ll += logits[static_cast<std::size_t>(ds.actions[i])] - m - std::log(lse);
    }
    double penalty = 0.0;
    for (double v : w.data()) penalty += v * v;
    return ll - 0.5 * config.l2 * penalty;
  };

  auto gradient = [&](const Matrix& w, const std::vector<double>& b,
                      Matrix& gw, std::vector<double>& gb) {
    gw = Matrix(d, p, 0.0);
    gb.assign(d, 0.0);
    std::vector<double> probs(d);
    for (std::size_t i : rows) {
      const auto x = ds.features.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        double z = b[j];
        for (std::size_t q = 0; q < p; ++q) z += w.at(j, q) * x[q];
        probs[j] = z;
      }
      softmax_inplace(probs);
      const std::size_t a = static_cast<std::size_t>(ds.actions[i]);
      for (std::size_t j = 0; j < d; ++j) {
        const double resid = (j == a ? 1.0 : 0.0) - probs[j];
        gb[j] += resid;
        for (std::size_t q = 0; q < p; ++q) gw.at(j, q) += resid * x[q];
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t q = 0; q < p; ++q) gw.at(j, q) -= config.l2 * w.at(j, q);
    }
  };

  Matrix grad_w;
  std::vector<double> grad_b;
  double obj = objective(weights, intercepts);
  bool converged = false;
  int iter = 0;
  double step = 1.0;  // warm-started across iterations
  for (; iter < config.max_iter; ++iter) {
    gradient(weights, intercepts, grad_w, grad_b);
    double grad_inf = 0.0;
    for (double v : grad_w.data()) grad_inf = std::max(grad_inf, std::abs(v));
    for (double v : grad_b) grad_inf = std::max(grad_inf, std::abs(v));
    if (grad_inf < config.tol) {
      converged = true;
      break;
    }

    // Ascent step with backtracking. The ridge part is applied in closed
    // form (shrinkage), so an arbitrarily large penalty cannot strangle
    // the step taken by the unpenalized intercept: with likelihood
    // gradient g_w = grad_w + l2 w, the update is
    //   w <- (w + s g_w) / (1 + s l2),  b <- b + s grad_b.
    step = std::min(step * 2.0, 1e6);
    bool moved = false;
    while (step > 1e-14) {
      Matrix w_next = weights;
      std::vector<double> b_next = intercepts;
      const double shrink = 1.0 + step * config.l2;
      for (std::size_t t = 0; t < w_next.data().size(); ++t) {
        const double likelihood_grad = grad_w.data()[t] + config.l2 * weights.data()[t];
        w_next.data()[t] = (weights.data()[t] + step * likelihood_grad) / shrink;
      }
      for (std::size_t j = 0; j < d; ++j) b_next[j] += step * grad_b[j];

      double move_sq = 0.0;
      for (std::size_t t = 0; t < w_next.data().size(); ++t) {
        const double delta = w_next.data()[t] - weights.data()[t];
        move_sq += delta * delta;
      }
      for (std::size_t j = 0; j < d; ++j) {
        move_sq += (b_next[j] - intercepts[j]) * (b_next[j] - intercepts[j]);
      }

      const double obj_next = objective(w_next, b_next);
      if (obj_next >= obj + 1e-4 * move_sq / step) {
        weights = std::move(w_next);
        intercepts = std::move(b_next);
        obj = obj_next;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no ascent progress; keep best iterate
  }

  return MultiLogitModel(std::move(weights), std::move(intercepts),
                         converged, iter, rows);
}

double KnnOutcomeModel::predict(std::span<const double> x) const {
  const std::size_t m = points_.rows();
  std::vector<std::pair<double, std::size_t>> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    const auto row = points_.row(i);
    for (std::size_t q = 0; q < row.size(); ++q) {
      const double diff = row[q] - x[q];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), m);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) sum += targets_[dist[t].second];
  return sum / static_cast<double>(k);
}

KnnOutcomeModel fit_outcome_knn(const ObservationalDataset& ds,
                                int exclude_fold, int arm,
                                const FoldAssignment& folds,
                                const KnnConfig& config) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (folds.fold_of[i] != exclude_fold && ds.actions[i] == arm) rows.push_back(i);
  }
  if (rows.empty()) {
    throw MissingArmInTrainingFolds("action " + std::to_string(arm) +
                                    " never observed outside fold " +
                                    std::to_string(exclude_fold));
  }
  Matrix points(rows.size(), ds.feature_dim());
  std::vector<double> targets(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto src = ds.features.row(rows[t]);
    std::copy(src.begin(), src.end(), points.row(t).begin());
    targets[t] = ds.rewards[rows[t]];
  }
  int k = config.k_neighbors;
  if (k <= 0) {
    k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rows.size()))));
  }
  return KnnOutcomeModel(std::move(points), std::move(targets), k, rows);
}

std::vector<double> clip_propensities(std::vector<double> p, double eta) {
  if (eta == 0.0) return p;
  const double d = static_cast<double>(p.size());
  if (eta < 0.0 || eta > 1.0 / d) {
    throw EtaOutOfRange("eta must lie in (0, 1/d], got " + std::to_string(eta));
  }
  for (double& v : p) v = std::max(v, eta);
  return p;
}

const MultiLogitModel& NuisanceFit::propensity_model(int fold) const {
  return propensity_models_.at(static_cast<std::size_t>(fold));
}

const KnnOutcomeModel& NuisanceFit::outcome_model(int fold, int arm) const {
  return outcome_models_.at(static_cast<std::size_t>(fold)).at(static_cast<std::size_t>(arm));
}

std::vector<double> NuisanceFit::predict_propensity(int fold, std::span<const double> x) const {
  return clip_propensities(propensity_model(fold).predict(x), eta_floor_);
}

double NuisanceFit::predict_outcome(int fold, int arm, std::span<const double> x) const {
  return outcome_model(fold, arm).predict(x);
}

Matrix NuisanceFit::cross_fitted_outcomes(const ObservationalDataset& ds) const {
  Matrix mu(ds.size(), static_cast<std::size_t>(num_actions_));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int k = folds_.fold_of[i];
    for (int a = 0; a < num_actions_; ++a) {
      mu.at(i, static_cast<std::size_t>(a)) = predict_outcome(k, a, ds.features.row(i));
    }
  }
  return mu;
}

Matrix NuisanceFit::cross_fitted_propensities(const ObservationalDataset& ds) const {
  if (propensities_known_) return clipped_known_;
  Matrix e(ds.size(), static_cast<std::size_t>(num_actions_));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto probs = predict_propensity(folds_.fold_of[i], ds.features.row(i));
    for (int a = 0; a < num_actions_; ++a) e.at(i, static_cast<std::size_t>(a)) = probs[static_cast<std::size_t>(a)];
  }
  return e;
}

NuisanceFit fit_cross_fitted_nuisances(const ObservationalDataset& ds,
                                       int num_folds, std::uint64_t seed,
                                       const NuisanceConfig& config) {
  NuisanceFit fit;
  fit.folds_ = make_folds(ds.size(), num_folds, derive_seed(seed, "folds"));
  fit.num_actions_ = ds.num_actions;
  fit.propensities_known_ = ds.known_propensities.has_value();
  fit.eta_floor_ = config.eta_floor.value_or(fit.propensities_known_ ? 0.0 : 0.1);

  if (fit.propensities_known_) {
    Matrix clipped = *ds.known_propensities;
    if (fit.eta_floor_ > 0.0) {
      for (double& v : clipped.data()) v = std::max(v, fit.eta_floor_);
    }
    fit.clipped_known_ = std::move(clipped);
  } else {
    fit.propensity_models_.reserve(static_cast<std::size_t>(num_folds));
    for (int k = 0; k < num_folds; ++k) {
      fit.propensity_models_.push_back(
          fit_propensity_multilogit(ds, k, fit.folds_, config.logit));
    }
  }

  fit.outcome_models_.resize(static_cast<std::size_t>(num_folds));
  for (int k = 0; k < num_folds; ++k) {
    auto& per_arm = fit.outcome_models_[static_cast<std::size_t>(k)];
    per_arm.reserve(static_cast<std::size_t>(ds.num_actions));
    for (int a = 0; a < ds.num_actions; ++a) {
      per_arm.push_back(fit_outcome_knn(ds, k, a, fit.folds_, config.knn));
    }
  }
  return fit;
}

}  // namespace opl
