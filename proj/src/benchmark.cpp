#include "opl/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "opl/errors.hpp"
#include "opl/rng.hpp"
#include "opl/scoring.hpp"
#include "opl/tree_search.hpp"

namespace opl {

Method parse_method(const std::string& name) {
  if (name == "caipwl-opt") return Method::CaipwlOpt;
  if (name == "caipwl-skip") return Method::CaipwlSkip;
  if (name == "caipwl-greedy") return Method::CaipwlGreedy;
  if (name == "ipwl-opt") return Method::IpwlOpt;
  if (name == "ipwl-skip") return Method::IpwlSkip;
  if (name == "ipwl-greedy") return Method::IpwlGreedy;
  if (name == "random") return Method::Random;
  throw ParameterOutOfRange("unknown method: " + name);
}

std::string method_name(Method method) {
  switch (method) {
    case Method::CaipwlOpt: return "caipwl-opt";
    case Method::CaipwlSkip: return "caipwl-skip";
    case Method::CaipwlGreedy: return "caipwl-greedy";
    case Method::IpwlOpt: return "ipwl-opt";
    case Method::IpwlSkip: return "ipwl-skip";
    case Method::IpwlGreedy: return "ipwl-greedy";
    case Method::Random: return "random";
  }
  return "unknown";
}

std::vector<Method> all_methods() {
  return {Method::CaipwlOpt,  Method::CaipwlSkip,  Method::CaipwlGreedy,
          Method::IpwlOpt,    Method::IpwlSkip,    Method::IpwlGreedy,
          Method::Random};
}

TreePolicy clean_data_reference_tree(std::size_t points, int depth, int skip,
                                     std::uint64_t seed, int threads) {
  const SyntheticTruth truth;
  const Matrix features = sample_features(points, derive_seed(seed, "reference"));
  ScoreMatrix scores{Matrix(points, SyntheticTruth::num_actions)};
  for (std::size_t i = 0; i < points; ++i) {
    for (int a = 0; a < SyntheticTruth::num_actions; ++a) {
      scores.values.at(i, static_cast<std::size_t>(a)) = truth.mean_reward(features.row(i), a);
    }
  }
  SearchConfig config{depth, skip, true, threads, false};
  return search_tree(features, scores, config).tree;
}

namespace {

bool needs_aipw(Method m) {
  return m == Method::CaipwlOpt || m == Method::CaipwlSkip || m == Method::CaipwlGreedy;
}

bool needs_ipw(Method m) {
  return m == Method::IpwlOpt || m == Method::IpwlSkip || m == Method::IpwlGreedy;
}

// Mean reward attained on the evaluation points; the random policy scores
// the uniform average over actions.
double value_on_points(const SyntheticTruth& truth, const TreePolicy& tree,
                       const Matrix& points) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    total += truth.mean_reward(points.row(i), tree.assign(points.row(i)));
  }
  return total / static_cast<double>(points.rows());
}

double random_policy_value(const SyntheticTruth& truth, const Matrix& points) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (int a = 0; a < SyntheticTruth::num_actions; ++a) {
      total += truth.mean_reward(points.row(i), a);
    }
  }
  return total / static_cast<double>(points.rows() * SyntheticTruth::num_actions);
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  if (config.runs < 1) throw ParameterOutOfRange("runs must be >= 1");
  if (config.n_values.empty()) throw ParameterOutOfRange("need at least one training size");
  for (Method m : config.methods) (void)method_name(m);

  const int workers_avail = config.threads > 0
                                ? config.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  BenchmarkResult result;
  result.reference_tree = clean_data_reference_tree(
      config.reference_points, config.depth, config.reference_skip,
      config.seed, workers_avail);

  for (std::size_t n : config.n_values) {
    // regrets[run][method index]
    std::vector<std::vector<double>> regrets(
        static_cast<std::size_t>(config.runs),
        std::vector<double>(config.methods.size(), 0.0));

    const bool any_aipw = std::any_of(config.methods.begin(), config.methods.end(), needs_aipw);
    const bool any_ipw = std::any_of(config.methods.begin(), config.methods.end(), needs_ipw);

    auto one_run = [&](int run, int search_threads) {
      const std::uint64_t run_seed = derive_seed(config.seed, "bench-run", static_cast<std::uint64_t>(run));
      auto [ds, run_truth] = generate_synthetic(n, run_seed);
      const Matrix eval_points = sample_features(config.n_test, derive_seed(run_seed, "test"));
      const double reference_value = value_on_points(run_truth, result.reference_tree, eval_points);

      ScoreMatrix aipw, ipw;
      if (any_aipw) {
        const NuisanceFit nf =
            fit_cross_fitted_nuisances(ds, config.folds, derive_seed(run_seed, "nuisance"), {});
        aipw = aipw_scores(ds, nf);
      }
      if (any_ipw) {
        ipw = ipw_scores(ds, *ds.known_propensities);
      }

      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        const Method m = config.methods[mi];
        double learned_value = 0.0;
        if (m == Method::Random) {
          learned_value = random_policy_value(run_truth, eval_points);
        } else {
          const ScoreMatrix& scores = needs_aipw(m) ? aipw : ipw;
          TreePolicy tree = TreePolicy::leaf(0);
          if (m == Method::CaipwlGreedy || m == Method::IpwlGreedy) {
            tree = greedy_tree(ds.features, scores, config.depth).tree;
          } else {
            const int skip = (m == Method::CaipwlSkip || m == Method::IpwlSkip) ? config.skip : 1;
            SearchConfig sc{config.depth, skip, search_threads > 1, search_threads, false};
            tree = search_tree(ds.features, scores, sc).tree;
          }
          learned_value = value_on_points(run_truth, tree, eval_points);
        }
        regrets[static_cast<std::size_t>(run)][mi] = reference_value - learned_value;
      }
    };

    if (workers_avail > 1 && config.runs > 1) {
      // Independent runs in parallel; each run writes its own slot, so the
      // reduction order is fixed regardless of scheduling.
      std::vector<std::thread> pool;
      const int pool_size = std::min(workers_avail, config.runs);
      std::atomic<int> next{0};
      for (int w = 0; w < pool_size; ++w) {
        pool.emplace_back([&]() {
          for (int run = next.fetch_add(1); run < config.runs; run = next.fetch_add(1)) {
            one_run(run, 1);
          }
        });
      }
      for (auto& t : pool) t.join();
    } else {
      for (int run = 0; run < config.runs; ++run) one_run(run, workers_avail);
    }

    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      double mean = 0.0;
      for (int run = 0; run < config.runs; ++run) mean += regrets[static_cast<std::size_t>(run)][mi];
      mean /= config.runs;
      double var = 0.0;
      for (int run = 0; run < config.runs; ++run) {
        const double dev = regrets[static_cast<std::size_t>(run)][mi] - mean;
        var += dev * dev;
      }
      var = config.runs > 1 ? var / (config.runs - 1) : 0.0;
      result.cells.push_back({method_name(config.methods[mi]), n, mean, std::sqrt(var), config.runs});
    }
  }
  return result;
}

std::string benchmark_csv(const BenchmarkResult& result) {
  std::ostringstream out;
  out << "method,n,mean_regret,std_regret,runs\n";
  char buf[64];
  for (const auto& cell : result.cells) {
    std::snprintf(buf, sizeof(buf), "%.17g", cell.mean_regret);
    out << cell.method << "," << cell.n << "," << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", cell.std_regret);
    out << buf << "," << cell.runs << "\n";
  }
  return out.str();
}

}  // namespace opl
