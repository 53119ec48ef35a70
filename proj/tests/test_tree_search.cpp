#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opl/errors.hpp"
#include "opl/rng.hpp"
#include "opl/simulation.hpp"
#include "opl/tree_search.hpp"
#include "support/oracles.hpp"

using namespace opl;

TEST_CASE("presort is stable and identifies runs") {
  const Matrix f = Matrix::from_rows({{0.3}, {0.1}, {0.3}});
  const auto sorted = presort(f);
  CHECK(sorted.order[0] == std::vector<int>{1, 0, 2});
  CHECK(run_starts(f, sorted, 0) == std::vector<std::size_t>{0, 1});

  const Matrix distinct = Matrix::from_rows({{1.0}, {2.0}, {3.0}});
  CHECK(presort(distinct).order[0] == std::vector<int>{0, 1, 2});

  const Matrix equal = Matrix(4, 1, 0.5);
  CHECK(run_starts(equal, presort(equal), 0) == std::vector<std::size_t>{0});
}

TEST_CASE("best_leaf picks the largest column sum with ties to the smaller action") {
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {0, 3}})};
  const std::vector<int> all{0, 1};
  const auto choice = best_leaf(scores, all);
  CHECK(choice.value == 3.0);
  CHECK(choice.action == 1);

  ScoreMatrix zeros{Matrix(3, 2, 0.0)};
  const std::vector<int> rows{0, 1, 2};
  CHECK(best_leaf(zeros, rows).value == 0.0);
  CHECK(best_leaf(zeros, rows).action == 0);

  CHECK(best_leaf(scores, {}).value == 0.0);
  CHECK(best_leaf(scores, {}).action == 0);
}

TEST_CASE("depth-2 solve finds the separating split") {
  const Matrix f = Matrix::from_rows({{0.1}, {0.2}, {0.8}, {0.9}});
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}})};
  const auto result = depth2_solve(f, scores, presort(f));
  CHECK(result.value == 4.0);
  REQUIRE(!result.tree.is_leaf());
  CHECK(result.tree.split_dim() == 0);
  CHECK(result.tree.split_value() == doctest::Approx(0.5));
  CHECK(result.tree.left().leaf_action() == 0);
  CHECK(result.tree.right().leaf_action() == 1);
}

TEST_CASE("depth-2 solve on identical features degrades to the best leaf") {
  const Matrix f = Matrix(4, 1, 0.25);
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 3}})};
  const auto result = depth2_solve(f, scores, presort(f));
  CHECK(result.tree.is_leaf());
  CHECK(result.value == 4.0);
  CHECK(result.tree.leaf_action() == 1);
}

TEST_CASE("depth-2 solve breaks full ties toward dimension 0 and the first split") {
  const Matrix f = Matrix::from_rows({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}});
  ScoreMatrix scores{Matrix(3, 2, 0.0)};
  const auto result = depth2_solve(f, scores, presort(f));
  CHECK(result.value == 0.0);
  REQUIRE(!result.tree.is_leaf());
  CHECK(result.tree.split_dim() == 0);
  CHECK(result.tree.split_value() == doctest::Approx(0.5));
  CHECK(result.tree.left().leaf_action() == 0);
  CHECK(result.tree.right().leaf_action() == 0);
}

TEST_CASE("depth 1 search equals best_leaf") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = testing::random_instance(rng, 10, 2, 3);
    const auto result = search_tree(inst.features, inst.scores, {1, 1, false, 1, false});
    std::vector<int> all(inst.features.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    const auto leaf = best_leaf(inst.scores, all);
    CHECK(result.value == leaf.value);
    CHECK(result.tree.is_leaf());
    CHECK(result.tree.leaf_action() == leaf.action);
  }
}

TEST_CASE("an exclusive-or pattern needs depth 3") {
  // Two interleaved classes at distinct coordinates: action 0 pays on the
  // low-low and high-high corners, action 1 on the other two.
  const Matrix f = Matrix::from_rows({{0.1, 0.2}, {0.2, 0.9}, {0.8, 0.1}, {0.9, 0.8}});
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {0, 1}, {0, 1}, {1, 0}})};

  const auto depth3 = search_tree(f, scores, {3, 1, false, 1, false});
  const auto depth2 = search_tree(f, scores, {2, 1, false, 1, false});
  CHECK(depth3.value == 4.0);
  CHECK(depth2.value == 3.0);
  CHECK(testing::brute_force_best_tree(f, scores, 3) == 4.0);
  CHECK(testing::brute_force_best_tree(f, scores, 2) == 3.0);
}

TEST_CASE("search agrees with the brute-force oracle on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = testing::random_instance(rng, 12, 3, 3);
    for (int depth = 1; depth <= 3; ++depth) {
      const auto result = search_tree(inst.features, inst.scores, {depth, 1, false, 1, false});
      const double oracle = testing::brute_force_best_tree(inst.features, inst.scores, depth);
      CHECK(result.value == oracle);

      // The returned tree attains the returned value.
      double recomputed = 0.0;
      for (std::size_t i = 0; i < inst.features.rows(); ++i) {
        recomputed += inst.scores.at(i, result.tree.assign(inst.features.row(i)));
      }
      CHECK(recomputed == result.value);
      CHECK(result.tree.depth() <= depth);
    }
  }
}

TEST_CASE("value is monotone in depth and in the skip parameter") {
  Rng rng(555);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing::random_instance(rng, 30, 3, 3, 2);
    double previous = -1e300;
    for (int depth = 1; depth <= 3; ++depth) {
      const double value = search_tree(inst.features, inst.scores, {depth, 1, false, 1, false}).value;
      CHECK(value >= previous);
      previous = value;
    }
    double prev_skip = 1e300;
    for (int skip : {1, 2, 5, 10}) {
      const double value = search_tree(inst.features, inst.scores, {3, skip, false, 1, false}).value;
      CHECK(value <= prev_skip);
      prev_skip = value;
    }
  }
}

TEST_CASE("greedy never beats the exact search") {
  Rng rng(777);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing::random_instance(rng, 25, 3, 3, 2);
    const auto exact = search_tree(inst.features, inst.scores, {3, 1, false, 1, false});
    const auto greedy = greedy_tree(inst.features, inst.scores, 3);
    CHECK(greedy.value <= exact.value);
  }
}

TEST_CASE("greedy equals exact when a single split separates the instance") {
  const Matrix f = Matrix::from_rows({{0.1}, {0.2}, {0.8}, {0.9}});
  ScoreMatrix scores{Matrix::from_rows({{1, 0}, {1, 0}, {0, 1}, {0, 1}})};
  const auto exact = search_tree(f, scores, {2, 1, false, 1, false});
  const auto greedy = greedy_tree(f, scores, 2);
  CHECK(greedy.value == exact.value);
  CHECK(greedy.tree == exact.tree);
}

TEST_CASE("search is deterministic, including with a parallel root") {
  Rng rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_instance(rng, 40, 3, 3, 10);
    const auto sequential = search_tree(inst.features, inst.scores, {3, 1, false, 1, false});
    const auto parallel = search_tree(inst.features, inst.scores, {3, 1, true, 4, false});
    CHECK(sequential.value == parallel.value);
    CHECK(sequential.tree == parallel.tree);
    CHECK(sequential.tree.to_json() == parallel.tree.to_json());
  }
}

TEST_CASE("memoization does not change the result") {
  Rng rng(808);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = testing::random_instance(rng, 20, 2, 3, 5);
    const auto plain = search_tree(inst.features, inst.scores, {3, 1, false, 1, false});
    const auto memo = search_tree(inst.features, inst.scores, {3, 1, false, 1, true});
    CHECK(plain.value == memo.value);
    CHECK(plain.tree == memo.tree);
  }
}

TEST_CASE("binary features keep the recursion near-linear") {
  Rng rng(4242);
  const std::size_t n = 400;
  const std::size_t p = 6;
  Matrix f(n, p);
  for (double& v : f.data()) v = rng.uniform_below(2) ? 1.0 : 0.0;
  ScoreMatrix scores{Matrix(n, 3)};
  for (double& v : scores.values.data()) {
    v = static_cast<double>(static_cast<int>(rng.uniform_below(7)) - 3);
  }
  SearchStats stats;
  (void)search_tree(f, scores, {3, 1, false, 1, false}, &stats);
  // Each dimension contributes at most one boundary per node, so the root
  // spawns at most 2 sum(K_m) = 4p recursive calls.
  CHECK(stats.recursive_calls <= 2 * (2 * p));
}

TEST_CASE("skip reduces the candidate set without breaking validity") {
  Rng rng(99);
  const auto inst = testing::random_instance(rng, 200, 2, 3, 100);
  const auto exact = search_tree(inst.features, inst.scores, {2, 1, false, 1, false});
  const auto skipped = search_tree(inst.features, inst.scores, {2, 10, false, 1, false});
  CHECK(skipped.value <= exact.value);
  double recomputed = 0.0;
  for (std::size_t i = 0; i < inst.features.rows(); ++i) {
    recomputed += inst.scores.at(i, skipped.tree.assign(inst.features.row(i)));
  }
  CHECK(recomputed == skipped.value);
}

TEST_CASE("returned value is consistent with the returned tree for float scores") {
  Rng rng(6060);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 50 + rng.uniform_below(100);
    Matrix f(n, 3);
    for (double& v : f.data()) v = rng.uniform01();
    ScoreMatrix scores{Matrix(n, 3)};
    for (double& v : scores.values.data()) v = rng.gaussian();
    const auto result = search_tree(f, scores, {3, 2, false, 1, false});
    double recomputed = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      recomputed += scores.at(i, result.tree.assign(f.row(i)));
    }
    CHECK(std::abs(result.value - recomputed) <= 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("degenerate single-action-better dataset yields a leaf at depth 1") {
  ScoreMatrix scores{Matrix::from_rows({{0, 1}, {0, 2}, {0, 3}})};
  const Matrix f = Matrix::from_rows({{0.0}, {0.5}, {1.0}});
  const auto result = search_tree(f, scores, {1, 1, false, 1, false});
  CHECK(result.tree.is_leaf());
  CHECK(result.tree.leaf_action() == 1);
  CHECK(result.value == 6.0);
}

TEST_CASE("input validation") {
  ScoreMatrix scores{Matrix(2, 2, 0.0)};
  CHECK_THROWS_AS(search_tree(Matrix(0, 1), ScoreMatrix{Matrix(0, 2)}, {2, 1, false, 1, false}),
                  EmptyPointSet);
  CHECK_THROWS_AS(search_tree(Matrix(3, 1), scores, {2, 1, false, 1, false}), DimensionMismatch);
  CHECK_THROWS_AS(search_tree(Matrix(2, 1), scores, {0, 1, false, 1, false}), ParameterOutOfRange);
  CHECK_THROWS_AS(search_tree(Matrix(2, 1), scores, {2, 0, false, 1, false}), ParameterOutOfRange);
}

TEST_CASE("caipwl pipeline is deterministic and degenerates to a leaf at depth 1") {
  auto [ds, truth] = opl::generate_synthetic(80, 12);
  const auto a = caipwl_fit(ds, 4, 9, {}, {1, 1, false, 1, false});
  const auto b = caipwl_fit(ds, 4, 9, {}, {1, 1, false, 1, false});
  CHECK(a.tree == b.tree);
  CHECK(a.value == b.value);
  CHECK(a.tree.is_leaf());
}
