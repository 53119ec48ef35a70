#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opl/matrix.hpp"
#include "opl/scoring.hpp"
#include "opl/simulation.hpp"
#include "opl/tree.hpp"

namespace opl {

/// Held-out value estimate of a policy: mean and standard error of the
/// per-observation scores it selects. The per-observation terms are kept
/// for paired comparisons downstream.
struct PolicyValueReport {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_test = 0;
  std::vector<double> per_obs;

  std::string to_json() const;
};

PolicyValueReport test_value_report(const ScoreMatrix& scores_test,
                                    const TreePolicy& tree,
                                    const Matrix& features_test);

struct TTestResult {
  double mean_diff = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  /// All per-observation differences equal but nonzero: the paired test is
  /// degenerate and the p-value is reported as 0 by convention.
  bool degenerate_variance = false;
};

/// Two-sided paired t-test on the per-observation score differences between
/// two policies. Needs at least two observations.
TTestResult value_difference_ttest(const ScoreMatrix& scores, const TreePolicy& t1,
                                   const TreePolicy& t2, const Matrix& features);

/// Two-sided p-value P(|T_df| >= |t|) via the regularized incomplete beta
/// function (continued fraction), absolute error below 1e-10.
double student_t_two_sided_p(double t, double df);

/// Mean over the evaluation points of the shortfall of the tree's action
/// against the pointwise best action under the true mean-reward function.
double regret_against(const SyntheticTruth& truth, const TreePolicy& tree,
                      const Matrix& eval_points);

/// Closed-form upper bound on the entropy integral of the depth-L tree
/// class over p features and d actions (natural logarithms):
/// sqrt((2^L - 1) ln p + 2^L ln d) + (4/3) L^(1/4) sqrt(2^L - 1).
double kappa_bound(int depth, int p, int d);

}  // namespace opl
