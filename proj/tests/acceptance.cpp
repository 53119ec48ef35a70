// Acceptance suite: every release criterion in one binary, one PASS/FAIL
// line each. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "opl/benchmark.hpp"
#include "opl/evaluation.hpp"
#include "opl/mip.hpp"
#include "opl/rng.hpp"
#include "opl/scoring.hpp"
#include "opl/simulation.hpp"
#include "opl/tree_search.hpp"
#include "support/oracles.hpp"

using namespace opl;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// 1. Exact optimizer equals independent brute-force enumeration on 300
//    random desk-scale instances, exactly, in under 10 seconds.
void criterion_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_instance(rng, 12, 3, 3);
    const int depth = 1 + static_cast<int>(rng.uniform_below(3));
    const auto result = search_tree(inst.features, inst.scores, {depth, 1, false, 1, false});
    const double oracle = testing::brute_force_best_tree(inst.features, inst.scores, depth);
    if (result.value != oracle) ++mismatches;
  }
  const double secs = elapsed_s(start);
  report(1, mismatches == 0 && secs < 10.0,
         "search vs brute force on 300 instances, " + std::to_string(mismatches) +
             " mismatches, " + fmt1(secs) + " s");
}

// 2. Exhaustive enumeration of MIP assignments through check_assignment
//    agrees exactly with the tree search (and the split-enumeration oracle)
//    on 50 tiny depth-2 instances, in under 60 seconds.
void criterion_mip_agreement() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(202);
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_instance(rng, 8, 2, 3, 2);
    const std::size_t n = inst.features.rows();
    const int d = inst.scores.num_actions();
    const auto model = build_mip(inst.features, inst.scores, 2);
    const auto search = search_tree(inst.features, inst.scores, {2, 1, false, 1, false});
    const double oracle = brute_force_mip_optimum(inst.features, inst.scores, 2);

    // Candidate thresholds: bounds, every normalized value, every value
    // plus its dimension's separation constant, and adjacent midpoints.
    const Matrix normalized = minmax_normalize(inst.features);
    std::vector<std::vector<double>> thresholds(inst.features.cols());
    for (std::size_t q = 0; q < inst.features.cols(); ++q) {
      auto& grid = thresholds[q];
      grid.push_back(0.0);
      grid.push_back(1.0);
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = normalized.at(i, q);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t t = 0; t < values.size(); ++t) {
        grid.push_back(values[t]);
        grid.push_back(std::min(1.0, values[t] + model.epsilon[q]));
        if (t + 1 < values.size()) grid.push_back(0.5 * (values[t] + values[t + 1]));
      }
    }

    std::unordered_map<std::string, double> assignment;
    for (const auto& var : model.vars) assignment[var.name] = 0.0;

    double best = -1e300;
    for (int q = 1; q <= model.p; ++q) {
      for (int qq = 1; qq <= model.p; ++qq) assignment["a_1_" + std::to_string(qq)] = qq == q ? 1 : 0;
      for (double b : thresholds[static_cast<std::size_t>(q - 1)]) {
        assignment["b_1"] = b;
        for (std::uint64_t zbits = 0; zbits < (1ULL << n); ++zbits) {
          for (std::size_t i = 0; i < n; ++i) {
            const bool leaf2 = (zbits >> i) & 1;
            assignment["z_" + std::to_string(i + 1) + "_1"] = leaf2 ? 0.0 : 1.0;
            assignment["z_" + std::to_string(i + 1) + "_2"] = leaf2 ? 1.0 : 0.0;
          }
          for (int k1 = 1; k1 <= d; ++k1) {
            for (int k2 = 1; k2 <= d; ++k2) {
              for (int k = 1; k <= d; ++k) {
                assignment["c_" + std::to_string(k) + "_1"] = k == k1 ? 1.0 : 0.0;
                assignment["c_" + std::to_string(k) + "_2"] = k == k2 ? 1.0 : 0.0;
              }
              const auto check = check_assignment(model, assignment);
              if (check.feasible) best = std::max(best, check.objective);
            }
          }
        }
      }
    }
    if (best != search.value || best != oracle) ++bad;
  }
  const double secs = elapsed_s(start);
  report(2, bad == 0 && secs < 60.0,
         "MIP enumeration vs search vs oracle on 50 instances, " + std::to_string(bad) +
             " disagreements, " + fmt1(secs) + " s");
}

// 3. Variable count formula at a reference scale.
void criterion_variable_count() {
  Rng rng(3);
  Matrix f(500, 10);
  for (double& v : f.data()) v = rng.uniform01();
  ScoreMatrix scores{Matrix(500, 3, 0.0)};
  const auto model = build_mip(f, scores, 3);
  report(3, model.variable_count() == 2045,
         "build_mip(n=500, p=10, depth=3, d=3) has " + std::to_string(model.variable_count()) +
             " variables (want 2045)");
}

// 4. Scaled regret benchmark at n = 2000 with 50 runs.
void criterion_benchmark() {
  const auto start = std::chrono::steady_clock::now();
  BenchmarkConfig config;
  config.n_values = {2000};
  config.runs = 50;
  config.methods = all_methods();
  config.seed = 20240815;
  config.depth = 3;
  config.skip = 10;
  config.folds = 5;
  config.n_test = 15000;
  const auto result = run_benchmark(config);

  auto cell = [&](Method m) {
    for (const auto& c : result.cells) {
      if (c.method == method_name(m)) return c.mean_regret;
    }
    return -1.0;
  };
  const double caipwl_opt = cell(Method::CaipwlOpt);
  const double caipwl_skip = cell(Method::CaipwlSkip);
  const double caipwl_greedy = cell(Method::CaipwlGreedy);
  const double ipwl_opt = cell(Method::IpwlOpt);
  const double ipwl_skip = cell(Method::IpwlSkip);
  const double ipwl_greedy = cell(Method::IpwlGreedy);
  const double random = cell(Method::Random);

  const bool ordering = caipwl_opt < ipwl_opt && caipwl_opt < caipwl_greedy &&
                        caipwl_opt < random && caipwl_skip < random && caipwl_greedy < random &&
                        ipwl_opt < random && ipwl_skip < random && ipwl_greedy < random;
  const bool opt_band = caipwl_opt >= 0.02 && caipwl_opt <= 0.12;
  const bool random_band = std::abs(random - 0.868) <= 0.02;
  const bool skip_band = std::abs(caipwl_skip - caipwl_opt) <= 0.02;
  const double secs = elapsed_s(start);

  std::ostringstream detail;
  detail << "caipwl-opt " << fmt1(caipwl_opt) << ", caipwl-skip " << fmt1(caipwl_skip)
         << ", caipwl-greedy " << fmt1(caipwl_greedy) << ", ipwl-opt " << fmt1(ipwl_opt)
         << ", random " << fmt1(random) << ", " << fmt1(secs) << " s";
  report(4, ordering && opt_band && random_band && skip_band, detail.str());
}

// 5. AIPW scores built from the true nuisances are unbiased for the policy
//    value of fixed trees.
void criterion_unbiasedness() {
  const auto start = std::chrono::steady_clock::now();
  auto [ds, truth] = generate_synthetic(100000, 515);
  Matrix mu(ds.size(), 3);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (int a = 0; a < 3; ++a) mu.at(i, static_cast<std::size_t>(a)) = truth.mean_reward(ds.features.row(i), a);
  }
  const auto scores = aipw_scores_from_predictions(ds, mu, *ds.known_propensities);

  const std::vector<TreePolicy> trees = {
      TreePolicy::leaf(1),
      TreePolicy::branch(5, 0.6, TreePolicy::leaf(0), TreePolicy::leaf(2)),
      TreePolicy::branch(5, 0.6,
                         TreePolicy::branch(7, 0.35, TreePolicy::leaf(2), TreePolicy::leaf(0)),
                         TreePolicy::branch(7, 0.65, TreePolicy::leaf(1), TreePolicy::leaf(2))),
  };
  const Matrix oracle_points = sample_features(1000000, 99);

  bool all_ok = true;
  std::ostringstream detail;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const auto report_t = test_value_report(scores, trees[t], ds.features);
    double oracle = 0.0;
    for (std::size_t i = 0; i < oracle_points.rows(); ++i) {
      oracle += truth.mean_reward(oracle_points.row(i), trees[t].assign(oracle_points.row(i)));
    }
    oracle /= static_cast<double>(oracle_points.rows());
    const double gap = std::abs(report_t.value - oracle);
    const bool ok = gap < 4.0 * report_t.std_error;
    all_ok = all_ok && ok;
    detail << "tree" << t << " |gap|=" << fmt1(gap) << " 4se=" << fmt1(4.0 * report_t.std_error)
           << " ";
  }
  const double secs = elapsed_s(start);
  report(5, all_ok && secs < 300.0, detail.str() + fmt1(secs) + " s");
}

// 6. Monotonicity in depth and skip, and greedy dominated by exact, on 100
//    random instances with exact arithmetic.
void criterion_monotonicity() {
  Rng rng(606);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testing::random_instance(rng, 30, 3, 3, 2);
    double prev = -1e300;
    for (int depth = 1; depth <= 3; ++depth) {
      const double v = search_tree(inst.features, inst.scores, {depth, 1, false, 1, false}).value;
      if (v < prev) ++violations;
      prev = v;
    }
    double prev_skip = 1e300;
    for (int skip : {1, 2, 5, 10}) {
      const double v = search_tree(inst.features, inst.scores, {3, skip, false, 1, false}).value;
      if (v > prev_skip) ++violations;
      prev_skip = v;
    }
    const double exact = search_tree(inst.features, inst.scores, {3, 1, false, 1, false}).value;
    if (greedy_tree(inst.features, inst.scores, 3).value > exact) ++violations;
  }
  report(6, violations == 0,
         "depth/skip monotonicity and greedy bound over 100 instances, " +
             std::to_string(violations) + " violations");
}

// 7. Performance floors for the search.
void criterion_performance() {
  Rng rng(707);
  bool ok = true;
  std::ostringstream detail;

  {
    Matrix f(100000, 10);
    for (double& v : f.data()) v = rng.uniform01();
    ScoreMatrix scores{Matrix(100000, 3)};
    for (double& v : scores.values.data()) v = rng.gaussian();
    const auto start = std::chrono::steady_clock::now();
    (void)search_tree(f, scores, {2, 1, false, 0, false});
    const double secs = elapsed_s(start);
    ok = ok && secs < 30.0;
    detail << "depth2 n=1e5: " << fmt1(secs) << " s (<30); ";
  }
  {
    Matrix f(2000, 10);
    for (double& v : f.data()) v = rng.uniform01();
    ScoreMatrix scores{Matrix(2000, 3)};
    for (double& v : scores.values.data()) v = rng.gaussian();
    const auto start = std::chrono::steady_clock::now();
    (void)search_tree(f, scores, {3, 1, true, 0, false});
    const double secs = elapsed_s(start);
    ok = ok && secs < 180.0;
    detail << "depth3 n=2000: " << fmt1(secs) << " s (<180); ";
  }
  {
    Matrix f(100000, 10);
    for (double& v : f.data()) v = rng.uniform_below(2) ? 1.0 : 0.0;
    ScoreMatrix scores{Matrix(100000, 3)};
    for (double& v : scores.values.data()) v = rng.gaussian();
    const auto start = std::chrono::steady_clock::now();
    (void)search_tree(f, scores, {3, 1, false, 0, false});
    const double secs = elapsed_s(start);
    ok = ok && secs < 60.0;
    detail << "depth3 binary n=1e5: " << fmt1(secs) << " s (<60)";
  }
  report(7, ok, detail.str());
}

// 8. Statistical utilities against high-precision references.
void criterion_statistics() {
  struct Case {
    double t, df, p;
  };
  const Case table[] = {
      {0.5, 1, 0.70483276469913345},     {1.0, 1, 0.5},
      {2.0, 1, 0.29516723530086655},     {0.5, 2, 0.66666666666666667},
      {1.5, 2, 0.27239312489100108},     {2.5, 3, 0.087706647008065547},
      {0.1, 4, 0.92515584093945328},     {1.0, 5, 0.36321746764912263},
      {3.0, 5, 0.030099247897462574},    {0.75, 7, 0.47769990990689039},
      {2.0, 10, 0.073388034770740366},   {4.5, 10, 0.0011431050868040652},
      {0.25, 15, 0.80597887742490253},   {1.96, 20, 0.064078253003576906},
      {2.576, 30, 0.015162993761018666}, {0.8, 50, 0.42749543781837289},
      {1.645, 100, 0.10310976517504638}, {3.29, 200, 0.0011839986021383266},
      {0.05, 1000, 0.96013237307195185}, {6.0, 8, 0.00032339322188514896},
  };
  double worst = 0.0;
  for (const auto& c : table) {
    worst = std::max(worst, std::abs(student_t_two_sided_p(c.t, c.df) - c.p));
  }
  const double kappa_gap = std::abs(kappa_bound(2, 2, 2) - 4.9490886458795063);
  report(8, worst < 1e-8 && kappa_gap < 1e-3,
         "t-table worst error " + fmt1(worst * 1e10) + "e-10, kappa(2,2,2) gap " +
             fmt1(kappa_gap * 1e6) + "e-6");
}

// 9. CLI determinism, including threaded runs.
void criterion_cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "opl_acceptance_cli";
  fs::create_directories(dir);
  auto sh = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string cli = OPL_CLI_PATH;
  bool ok = true;

  ok = ok && sh(cli + " simulate --n 400 --seed 5 --out " + (dir / "s1.csv").string()) == 0;
  ok = ok && sh(cli + " simulate --n 400 --seed 5 --out " + (dir / "s2.csv").string()) == 0;
  ok = ok && slurp(dir / "s1.csv") == slurp(dir / "s2.csv");

  const std::string fit_flags = " fit --data " + (dir / "s1.csv").string() +
                                " --method caipwl --depth 3 --seed 12 --threads 2 --out ";
  ok = ok && sh(cli + fit_flags + (dir / "f1.json").string()) == 0;
  ok = ok && sh(cli + fit_flags + (dir / "f2.json").string()) == 0;
  ok = ok && slurp(dir / "f1.json") == slurp(dir / "f2.json");
  ok = ok && !slurp(dir / "f1.json").empty();

  report(9, ok, "simulate and threaded fit are byte-identical across reruns");
}

}  // namespace

int main() {
  criterion_oracle_equivalence();
  criterion_mip_agreement();
  criterion_variable_count();
  criterion_benchmark();
  criterion_unbiasedness();
  criterion_monotonicity();
  criterion_performance();
  criterion_statistics();
  criterion_cli_determinism();
  if (failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", failures);
  }
  return failures;
}
