#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opl/matrix.hpp"

namespace opl {

/// Logged observational triples (X_i, A_i, Y_i), optionally with the
/// logging policy's action probabilities. Actions are 0-based indices in
/// [0, num_actions). Immutable by convention once validated.
struct ObservationalDataset {
  Matrix features;                          // n x p
  std::vector<int> actions;                 // length n
  std::vector<double> rewards;              // length n
  std::optional<Matrix> known_propensities; // n x num_actions
  int num_actions = 0;

  std::size_t size() const { return features.rows(); }
  std::size_t feature_dim() const { return features.cols(); }
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

/// Checks every dataset invariant and returns the dataset unchanged.
/// Known propensities below `eta_warning` produce a warning in `report`
/// (when given) but are not rejected; a zero probability on the logged
/// action is rejected outright.
///
/// Throws DimensionMismatch, NonFiniteValue, ActionOutOfRange,
/// InvalidPropensityRow.
ObservationalDataset validate_dataset(ObservationalDataset raw,
                                      double eta_warning = 0.01,
                                      ValidationReport* report = nullptr);

}  // namespace opl
