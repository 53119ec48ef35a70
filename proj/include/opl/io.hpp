#pragma once

#include <string>

#include "opl/dataset.hpp"
#include "opl/matrix.hpp"
#include "opl/scoring.hpp"
#include "opl/tree.hpp"

namespace opl {

/// Dataset CSV schema: header x0..x{p-1},action,reward with optional
/// trailing e0..e{d-1} propensity columns; comma separated, '.' decimal.
/// Without propensity columns the action count is inferred as
/// max(action) + 1.
ObservationalDataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const ObservationalDataset& ds, const std::string& path);

/// Score CSV: header g0..g{d-1}, one row per observation.
ScoreMatrix read_scores_csv(const std::string& path);
void write_scores_csv(const ScoreMatrix& scores, const std::string& path);

/// Precomputed cross-fitted nuisance predictions: header
/// mu_0..mu_{d-1},e_0..e_{d-1}, one row per observation.
struct NuisanceOverride {
  Matrix mu;  // n x d
  Matrix e;   // n x d
};
NuisanceOverride read_nuisance_override_csv(const std::string& path);

TreePolicy read_tree_json(const std::string& path);
void write_tree_json(const TreePolicy& tree, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace opl
