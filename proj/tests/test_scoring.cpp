#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <numeric>

#include "opl/errors.hpp"
#include "opl/io.hpp"
#include "opl/rng.hpp"
#include "opl/scoring.hpp"
#include "opl/simulation.hpp"

using namespace opl;

namespace {

ObservationalDataset one_row(double reward, int action, int d = 2) {
  ObservationalDataset ds;
  ds.features = Matrix(1, 1, 0.0);
  ds.actions = {action};
  ds.rewards = {reward};
  ds.num_actions = d;
  return ds;
}

}  // namespace

TEST_CASE("aipw row by direct substitution") {
  const auto ds = one_row(1.0, 0);
  const Matrix mu = Matrix::from_rows({{0.4, 0.6}});
  const Matrix e = Matrix::from_rows({{0.5, 0.5}});
  const auto scores = aipw_scores_from_predictions(ds, mu, e);
  CHECK(scores.at(0, 0) == doctest::Approx(1.6));
  CHECK(scores.at(0, 1) == doctest::Approx(0.6));
}

TEST_CASE("perfect outcome model makes the residual vanish") {
  const auto ds = one_row(0.37, 1);
  const Matrix mu = Matrix::from_rows({{-2.0, 0.37}});
  const Matrix e = Matrix::from_rows({{0.7, 0.3}});
  const auto scores = aipw_scores_from_predictions(ds, mu, e);
  CHECK(scores.at(0, 0) == -2.0);
  CHECK(scores.at(0, 1) == 0.37);
}

TEST_CASE("degenerate propensity one reduces to the reward") {
  const auto ds = one_row(3.25, 0);
  const Matrix mu = Matrix::from_rows({{0.0, 0.0}});
  const Matrix e = Matrix::from_rows({{1.0, 0.0}});
  const auto scores = aipw_scores_from_predictions(ds, mu, e);
  CHECK(scores.at(0, 0) == 3.25);
  CHECK(scores.at(0, 1) == 0.0);
}

TEST_CASE("ipw rows") {
  const auto ds = one_row(1.0, 0);
  const auto scores = ipw_scores(ds, Matrix::from_rows({{0.5, 0.5}}));
  CHECK(scores.at(0, 0) == 2.0);
  CHECK(scores.at(0, 1) == 0.0);

  const auto zero = ipw_scores(one_row(0.0, 0), Matrix::from_rows({{0.5, 0.5}}));
  CHECK(zero.at(0, 0) == 0.0);
  CHECK(zero.at(0, 1) == 0.0);

  const auto unit = ipw_scores(one_row(0.8, 0), Matrix::from_rows({{1.0, 0.0}}));
  CHECK(unit.at(0, 0) == 0.8);
}

TEST_CASE("zero propensity on the logged arm is rejected") {
  const auto ds = one_row(1.0, 1);
  CHECK_THROWS_AS(ipw_scores(ds, Matrix::from_rows({{1.0, 0.0}})), ZeroPropensity);
}

TEST_CASE("aipw with a zero outcome model collapses to ipw exactly") {
  auto [ds, truth] = generate_synthetic(200, 21);
  const Matrix mu(ds.size(), 3, 0.0);
  const auto aipw = aipw_scores_from_predictions(ds, mu, *ds.known_propensities);
  const auto ipw = ipw_scores(ds, *ds.known_propensities);
  CHECK(aipw.values == ipw.values);
}

TEST_CASE("policy_value examples") {
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {0, 2}})};
  const std::vector<int> assignments{0, 1};
  CHECK(policy_value(scores, assignments) == doctest::Approx(1.5));

  ScoreMatrix zeros{Matrix(5, 3, 0.0)};
  const std::vector<int> any{2, 1, 0, 2, 1};
  CHECK(policy_value(zeros, any) == 0.0);

  ScoreMatrix single{Matrix::from_rows({{3, 7}})};
  const std::vector<int> pick{1};
  CHECK(policy_value(single, pick) == 7.0);

  const std::vector<int> wrong{0};
  CHECK_THROWS_AS(policy_value(scores, wrong), DimensionMismatch);
}

TEST_CASE("policy_value is linear in scores and permutation invariant") {
  Rng rng(33);
  const std::size_t n = 50;
  ScoreMatrix a{Matrix(n, 3)}, b{Matrix(n, 3)};
  for (double& v : a.values.data()) v = rng.uniform01() * 4 - 2;
  for (double& v : b.values.data()) v = rng.uniform01() * 4 - 2;
  std::vector<int> assign(n);
  for (auto& x : assign) x = static_cast<int>(rng.uniform_below(3));

  ScoreMatrix combo{Matrix(n, 3)};
  for (std::size_t t = 0; t < combo.values.data().size(); ++t) {
    combo.values.data()[t] = 2.0 * a.values.data()[t] + 0.5 * b.values.data()[t];
  }
  CHECK(policy_value(combo, assign) ==
        doctest::Approx(2.0 * policy_value(a, assign) + 0.5 * policy_value(b, assign)));

  // Jointly permuting rows and assignments leaves the value unchanged.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
  ScoreMatrix shuffled{Matrix(n, 3)};
  std::vector<int> shuffled_assign(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) shuffled.values.at(i, static_cast<std::size_t>(k)) = a.at(perm[i], k);
    shuffled_assign[i] = assign[perm[i]];
  }
  CHECK(policy_value(shuffled, shuffled_assign) == doctest::Approx(policy_value(a, assign)));
}

TEST_CASE("score and dataset CSV files round-trip exactly") {
  auto [ds, truth] = generate_synthetic(40, 60);
  const auto nf = fit_cross_fitted_nuisances(ds, 4, 2, {});
  const auto scores = aipw_scores(ds, nf);

  const std::string scores_path = "roundtrip_scores.csv";
  write_scores_csv(scores, scores_path);
  const auto scores_back = read_scores_csv(scores_path);
  CHECK(scores_back.values == scores.values);
  std::remove(scores_path.c_str());

  const std::string data_path = "roundtrip_data.csv";
  write_dataset_csv(ds, data_path);
  const auto ds_back = read_dataset_csv(data_path);
  CHECK(ds_back.features == ds.features);
  CHECK(ds_back.actions == ds.actions);
  CHECK(ds_back.rewards == ds.rewards);
  CHECK(*ds_back.known_propensities == *ds.known_propensities);
  CHECK(ds_back.num_actions == ds.num_actions);
  std::remove(data_path.c_str());
}

TEST_CASE("aipw via NuisanceFit matches the prediction-matrix path") {
  auto [ds, truth] = generate_synthetic(150, 77);
  const auto nf = fit_cross_fitted_nuisances(ds, 3, 9, {});
  const auto direct = aipw_scores(ds, nf);
  const auto via = aipw_scores_from_predictions(ds, nf.cross_fitted_outcomes(ds),
                                                nf.cross_fitted_propensities(ds));
  CHECK(direct.values == via.values);
}
