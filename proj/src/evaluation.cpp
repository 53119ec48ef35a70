#include "opl/evaluation.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "opl/errors.hpp"

namespace opl {

namespace {

// Regularized incomplete beta I_x(a, b) by the standard continued fraction
// (modified Lentz), symmetric split at the convergence boundary.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double sample_mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double v : xs) sum += v;
  return sum / static_cast<double>(xs.size());
}

// Unbiased (n-1) sample variance.
double sample_variance(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : xs) sum += (v - mean) * (v - mean);
  return sum / static_cast<double>(xs.size() - 1);
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw ParameterOutOfRange("degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(0.5 * df, 0.5, x);
}

std::string PolicyValueReport::to_json() const {
  nlohmann::json j{{"value", value}, {"std_error", std_error}, {"n_test", n_test}};
  return j.dump(2);
}

PolicyValueReport test_value_report(const ScoreMatrix& scores_test,
                                    const TreePolicy& tree,
                                    const Matrix& features_test) {
  if (scores_test.size() != features_test.rows()) {
    throw DimensionMismatch("test scores and features must have the same number of rows");
  }
  if (scores_test.size() == 0) throw EmptyPointSet("empty test set");

  PolicyValueReport report;
  report.n_test = scores_test.size();
  report.per_obs.resize(report.n_test);
  for (std::size_t i = 0; i < report.n_test; ++i) {
    report.per_obs[i] = scores_test.at(i, tree.assign(features_test.row(i)));
  }
  report.value = sample_mean(report.per_obs);
  report.std_error = std::sqrt(sample_variance(report.per_obs, report.value) /
                               static_cast<double>(report.n_test));
  return report;
}

TTestResult value_difference_ttest(const ScoreMatrix& scores, const TreePolicy& t1,
                                   const TreePolicy& t2, const Matrix& features) {
  if (scores.size() != features.rows()) {
    throw DimensionMismatch("scores and features must have the same number of rows");
  }
  const std::size_t n = scores.size();
  if (n < 2) throw ParameterOutOfRange("paired t-test needs at least two observations");

  std::vector<double> diffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = features.row(i);
    diffs[i] = scores.at(i, t1.assign(x)) - scores.at(i, t2.assign(x));
  }
  TTestResult result;
  result.mean_diff = sample_mean(diffs);
  const double var = sample_variance(diffs, result.mean_diff);
  if (var == 0.0) {
    if (result.mean_diff == 0.0) {
      return result;  // identical assignments: t = 0, p = 1
    }
    result.degenerate_variance = true;
    result.t_stat = result.mean_diff > 0 ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
    result.p_value = 0.0;
    return result;
  }
  result.t_stat = result.mean_diff / std::sqrt(var / static_cast<double>(n));
  result.p_value = student_t_two_sided_p(result.t_stat, static_cast<double>(n - 1));
  return result;
}

double regret_against(const SyntheticTruth& truth, const TreePolicy& tree,
                      const Matrix& eval_points) {
  if (eval_points.rows() == 0) throw EmptyPointSet("regret needs evaluation points");
  double total = 0.0;
  for (std::size_t i = 0; i < eval_points.rows(); ++i) {
    const auto x = eval_points.row(i);
    const int star = truth.optimal_action(x);
    total += truth.mean_reward(x, star) - truth.mean_reward(x, tree.assign(x));
  }
  return total / static_cast<double>(eval_points.rows());
}

double kappa_bound(int depth, int p, int d) {
  if (depth < 1 || p < 1 || d < 2) {
    throw ParameterOutOfRange("kappa bound needs depth >= 1, p >= 1, d >= 2");
  }
  const double leaves = std::ldexp(1.0, depth);        // 2^L
  const double branches = leaves - 1.0;                // 2^L - 1
  return std::sqrt(branches * std::log(static_cast<double>(p)) +
                   leaves * std::log(static_cast<double>(d))) +
         (4.0 / 3.0) * std::pow(static_cast<double>(depth), 0.25) * std::sqrt(branches);
}

}  // namespace opl
