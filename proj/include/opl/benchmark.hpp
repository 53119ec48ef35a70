#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opl/simulation.hpp"
#include "opl/tree.hpp"

namespace opl {

enum class Method {
  CaipwlOpt,
  CaipwlSkip,
  CaipwlGreedy,
  IpwlOpt,
  IpwlSkip,
  IpwlGreedy,
  Random,
};

/// Throws ParameterOutOfRange for unknown names. Accepted names:
/// caipwl-opt, caipwl-skip, caipwl-greedy, ipwl-opt, ipwl-skip,
/// ipwl-greedy, random.
Method parse_method(const std::string& name);
std::string method_name(Method method);
std::vector<Method> all_methods();

struct BenchmarkConfig {
  std::vector<std::size_t> n_values;
  int runs = 50;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 1;
  int depth = 3;
  int skip = 10;        // approximation parameter of the -skip variants
  int folds = 5;
  std::size_t n_test = 15000;
  /// The regret baseline is the best fixed tree for the process, learned
  /// once from noise-free draws: this many points, searched with this skip.
  std::size_t reference_points = 10000;
  int reference_skip = 10;
  int threads = 0;      // 0 = hardware concurrency; runs execute in parallel
};

struct BenchmarkCell {
  std::string method;
  std::size_t n = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  int runs = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkCell> cells;
  TreePolicy reference_tree = TreePolicy::leaf(0);
};

/// Best depth-limited tree for the synthetic process, learned by running
/// the tree search on noise-free draws scored with the true mean rewards.
TreePolicy clean_data_reference_tree(std::size_t points, int depth, int skip,
                                     std::uint64_t seed, int threads = 0);

/// For each (n, method): `runs` independent training draws, a fresh
/// evaluation draw per run, and the mean/std over runs of the learned
/// policy's regret against the reference tree on the evaluation points.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

std::string benchmark_csv(const BenchmarkResult& result);

}  // namespace opl
