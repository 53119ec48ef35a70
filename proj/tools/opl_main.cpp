#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opl/benchmark.hpp"
#include "opl/errors.hpp"
#include "opl/evaluation.hpp"
#include "opl/io.hpp"
#include "opl/mip.hpp"
#include "opl/scoring.hpp"
#include "opl/simulation.hpp"
#include "opl/tree_search.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

struct FitFlags {
  std::string data;
  std::string method = "caipwl";
  int depth = 3;
  int skip = 1;
  int folds = 5;
  std::uint64_t seed = 1;
  double eta = -1.0;  // negative = library default
  std::string nuisance_override;
  std::string out = "tree.json";
  std::string manifest_out;
  std::string scores_out;
  int threads = 0;
};

opl::NuisanceConfig nuisance_config(const FitFlags& flags) {
  opl::NuisanceConfig config;
  if (flags.eta >= 0.0) config.eta_floor = flags.eta;
  return config;
}

opl::SearchConfig search_config(const FitFlags& flags) {
  return {flags.depth, flags.skip, flags.threads != 1, flags.threads, false};
}

// Scores for the requested method, honoring a nuisance-override file.
opl::ScoreMatrix scores_for(const opl::ObservationalDataset& ds, const FitFlags& flags) {
  if (!flags.nuisance_override.empty()) {
    const opl::NuisanceOverride nuisances = opl::read_nuisance_override_csv(flags.nuisance_override);
    opl::Matrix e = nuisances.e;
    if (flags.eta > 0.0) {
      for (double& v : e.data()) v = std::max(v, flags.eta);
    }
    if (flags.method == "caipwl") {
      return opl::aipw_scores_from_predictions(ds, nuisances.mu, e);
    }
    return opl::ipw_scores(ds, e);
  }
  if (flags.method == "caipwl") {
    const opl::NuisanceFit nf =
        opl::fit_cross_fitted_nuisances(ds, flags.folds, flags.seed, nuisance_config(flags));
    return opl::aipw_scores(ds, nf);
  }
  // ipwl: known propensities when present, cross-fitted multinomial logit
  // otherwise; mirrors opl::ipwl_fit.
  if (ds.known_propensities) {
    opl::Matrix e = *ds.known_propensities;
    const double eta = flags.eta >= 0.0 ? flags.eta : 0.0;
    if (eta > 0.0) {
      for (double& v : e.data()) v = std::max(v, eta);
    }
    return opl::ipw_scores(ds, e);
  }
  const opl::FitResult fit = opl::ipwl_fit(ds, flags.folds, flags.seed, nuisance_config(flags),
                                           {1, 1, false, 1, false});
  return fit.scores;
}

int cmd_simulate(std::size_t n, std::uint64_t seed, const std::string& out,
                 const std::string& truth_out) {
  auto [ds, truth] = opl::generate_synthetic(n, seed);
  opl::write_dataset_csv(ds, out);
  if (!truth_out.empty()) {
    nlohmann::json j{
        {"feature_dim", opl::SyntheticTruth::feature_dim},
        {"num_actions", opl::SyntheticTruth::num_actions},
        {"noise_std", opl::SyntheticTruth::noise_std},
        {"seed", seed},
        {"n", n},
        {"regions",
         {{"region0", "0 <= x5 < 0.6 and 0.35 < x7 <= 1, outside the ellipses"},
          {"region2", "x5^2/0.6^2 + x7^2/0.35^2 < 1 or (x5-1)^2/0.4^2 + (x7-1)^2/0.35^2 < 1"},
          {"region1", "complement"}}},
        {"propensities", {{"region0", {0.2, 0.6, 0.2}}, {"region1", {0.2, 0.6, 0.2}}, {"region2", {0.4, 0.2, 0.4}}}},
        {"mean_rewards", {{"region0", "3 - a"}, {"region1", "2 - |a - 1|/2"}, {"region2", "1.5 (a - 1)"}}},
    };
    opl::write_text_file(truth_out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_fit(const FitFlags& flags) {
  opl::ValidationReport report;
  const opl::ObservationalDataset ds =
      opl::validate_dataset(opl::read_dataset_csv(flags.data), 0.01, &report);
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  const opl::ScoreMatrix scores = scores_for(ds, flags);
  const opl::SearchResult result = opl::search_tree(ds.features, scores, search_config(flags));
  opl::write_tree_json(result.tree, flags.out);
  if (!flags.scores_out.empty()) opl::write_scores_csv(scores, flags.scores_out);

  const double resolved_eta =
      flags.eta >= 0.0 ? flags.eta
                       : (!flags.nuisance_override.empty() ? 0.0
                          : ds.known_propensities            ? 0.0
                                                             : 0.1);
  nlohmann::json manifest{
      {"command", "fit"},
      {"data", flags.data},
      {"method", flags.method},
      {"depth", flags.depth},
      {"skip", flags.skip},
      {"folds", flags.folds},
      {"seed", flags.seed},
      {"eta", resolved_eta},
      {"nuisance_override", flags.nuisance_override},
      {"threads", flags.threads},
      {"tree_file", flags.out},
      {"scores_out", flags.scores_out},
      {"training_value_total", result.value},
      {"training_value", result.value / static_cast<double>(ds.size())},
  };
  const std::string manifest_path =
      flags.manifest_out.empty() ? flags.out + ".manifest.json" : flags.manifest_out;
  opl::write_text_file(manifest_path, manifest.dump(2) + "\n");
  std::cout << "value " << result.value / static_cast<double>(ds.size()) << "\n"
            << result.tree.pretty();
  return kExitOk;
}

int cmd_evaluate(const std::string& data, const std::string& tree_path,
                 const std::string& tree2_path, int folds, std::uint64_t seed,
                 double eta, const std::string& out) {
  const opl::ObservationalDataset ds = opl::validate_dataset(opl::read_dataset_csv(data));
  const opl::TreePolicy tree = opl::read_tree_json(tree_path);

  opl::NuisanceConfig config;
  if (eta >= 0.0) config.eta_floor = eta;
  const opl::NuisanceFit nf = opl::fit_cross_fitted_nuisances(ds, folds, seed, config);
  const opl::ScoreMatrix scores = opl::aipw_scores(ds, nf);

  const opl::PolicyValueReport report = opl::test_value_report(scores, tree, ds.features);
  nlohmann::json j{{"value", report.value},
                   {"std_error", report.std_error},
                   {"n_test", report.n_test}};
  if (!tree2_path.empty()) {
    const opl::TreePolicy tree2 = opl::read_tree_json(tree2_path);
    const opl::PolicyValueReport report2 = opl::test_value_report(scores, tree2, ds.features);
    j["tree2"] = {{"value", report2.value},
                  {"std_error", report2.std_error},
                  {"n_test", report2.n_test}};
    const opl::TTestResult ttest = opl::value_difference_ttest(scores, tree, tree2, ds.features);
    j["ttest"] = {{"mean_diff", ttest.mean_diff},
                  {"t_stat", ttest.t_stat},
                  {"p_value", ttest.p_value},
                  {"degenerate_variance", ttest.degenerate_variance}};
  }
  opl::write_text_file(out, j.dump(2) + "\n");
  std::cout << "value " << report.value << " +- " << report.std_error << "\n";
  return kExitOk;
}

int cmd_export_mip(const std::string& data, const std::string& scores_path,
                   const FitFlags& flags, const std::string& out) {
  const opl::ObservationalDataset ds = opl::validate_dataset(opl::read_dataset_csv(data));
  opl::ScoreMatrix scores;
  if (!scores_path.empty()) {
    scores = opl::read_scores_csv(scores_path);
    if (scores.size() != ds.size()) {
      throw opl::DimensionMismatch("score rows do not match dataset rows");
    }
  } else {
    scores = scores_for(ds, flags);
  }
  const opl::MipModel model = opl::build_mip(ds.features, scores, flags.depth);
  opl::write_lp(model, out);
  std::cout << model.variable_count() << " variables\n";
  return kExitOk;
}

int cmd_bench(const std::string& n_list, const std::string& methods, int runs,
              std::uint64_t seed, int depth, int skip, int folds, std::size_t n_test,
              std::size_t ref_points, int ref_skip, int threads, const std::string& out) {
  opl::BenchmarkConfig config;
  config.runs = runs;
  config.seed = seed;
  config.depth = depth;
  config.skip = skip;
  config.folds = folds;
  config.n_test = n_test;
  config.reference_points = ref_points;
  config.reference_skip = ref_skip;
  config.threads = threads;

  config.n_values.clear();
  std::istringstream ns(n_list);
  std::string piece;
  while (std::getline(ns, piece, ',')) {
    const long v = std::stol(piece);
    if (v < 1) throw opl::ParameterOutOfRange("training sizes must be >= 1");
    config.n_values.push_back(static_cast<std::size_t>(v));
  }
  if (!methods.empty()) {
    config.methods.clear();
    std::istringstream ms(methods);
    while (std::getline(ms, piece, ',')) config.methods.push_back(opl::parse_method(piece));
  }

  const opl::BenchmarkResult result = opl::run_benchmark(config);
  const std::string csv = opl::benchmark_csv(result);
  opl::write_text_file(out, csv);
  std::cout << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline policy learning with decision trees"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Draw a synthetic logged dataset");
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "data.csv";
  std::string sim_truth_out;
  simulate->add_option("--n", sim_n, "Number of observations")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out", sim_out, "Output dataset CSV");
  simulate->add_option("--truth-out", sim_truth_out, "Optional truth metadata JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "Learn a depth-limited tree policy");
  FitFlags fit_flags;
  fit->add_option("--data", fit_flags.data, "Training dataset CSV")->required();
  fit->add_option("--method", fit_flags.method, "caipwl or ipwl")
      ->check(CLI::IsMember({"caipwl", "ipwl"}));
  fit->add_option("--depth", fit_flags.depth, "Tree depth (layers incl. leaves)")
      ->check(CLI::PositiveNumber);
  fit->add_option("--skip", fit_flags.skip, "Approximation parameter; 1 = exact")
      ->check(CLI::PositiveNumber);
  fit->add_option("--folds", fit_flags.folds, "Cross-fitting folds");
  fit->add_option("--seed", fit_flags.seed, "Random seed");
  fit->add_option("--eta", fit_flags.eta, "Propensity clipping floor");
  fit->add_option("--nuisance-override", fit_flags.nuisance_override,
                  "CSV of precomputed mu_a/e_a predictions");
  fit->add_option("--out", fit_flags.out, "Output tree JSON");
  fit->add_option("--manifest-out", fit_flags.manifest_out,
                  "Run manifest path (default: <out>.manifest.json)");
  fit->add_option("--scores-out", fit_flags.scores_out,
                  "Optional CSV export of the score matrix used for the search");
  fit->add_option("--threads", fit_flags.threads, "Worker cap; 0 = all cores");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Held-out evaluation and comparison");
  std::string eval_data, eval_tree, eval_tree2, eval_out = "report.json";
  int eval_folds = 5;
  std::uint64_t eval_seed = 1;
  double eval_eta = -1.0;
  evaluate->add_option("--data", eval_data, "Held-out dataset CSV")->required();
  evaluate->add_option("--tree", eval_tree, "Tree JSON")->required();
  evaluate->add_option("--tree2", eval_tree2, "Second tree JSON for a paired t-test");
  evaluate->add_option("--folds", eval_folds, "Cross-fitting folds for the test scores");
  evaluate->add_option("--seed", eval_seed, "Random seed");
  evaluate->add_option("--eta", eval_eta, "Propensity clipping floor");
  evaluate->add_option("--out", eval_out, "Output report JSON");

  // export-mip
  auto* export_mip = app.add_subcommand("export-mip", "Write the policy-tree MIP as an LP file");
  std::string mip_data, mip_scores, mip_out = "model.lp";
  FitFlags mip_flags;
  export_mip->add_option("--data", mip_data, "Dataset CSV")->required();
  export_mip->add_option("--scores", mip_scores, "Precomputed score CSV (skips nuisance fitting)");
  export_mip->add_option("--method", mip_flags.method, "caipwl or ipwl (when no --scores)")
      ->check(CLI::IsMember({"caipwl", "ipwl"}));
  export_mip->add_option("--depth", mip_flags.depth, "Tree depth")->check(CLI::PositiveNumber);
  export_mip->add_option("--folds", mip_flags.folds, "Cross-fitting folds");
  export_mip->add_option("--seed", mip_flags.seed, "Random seed");
  export_mip->add_option("--eta", mip_flags.eta, "Propensity clipping floor");
  export_mip->add_option("--nuisance-override", mip_flags.nuisance_override,
                         "CSV of precomputed mu_a/e_a predictions");
  export_mip->add_option("--out", mip_out, "Output LP file");

  // bench
  auto* bench = app.add_subcommand("bench", "Synthetic regret benchmark");
  std::string bench_n_list = "2000", bench_methods, bench_out = "table.csv";
  int bench_runs = 50, bench_depth = 3, bench_skip = 10, bench_folds = 5, bench_threads = 0;
  int bench_ref_skip = 10;
  std::size_t bench_n_test = 15000, bench_ref_points = 10000;
  std::uint64_t bench_seed = 1;
  bench->add_option("--n-list", bench_n_list, "Comma-separated training sizes");
  bench->add_option("--runs", bench_runs, "Runs per cell")->check(CLI::PositiveNumber);
  bench->add_option("--methods", bench_methods,
                    "Comma-separated subset of caipwl-opt,caipwl-skip,caipwl-greedy,"
                    "ipwl-opt,ipwl-skip,ipwl-greedy,random (default all)");
  bench->add_option("--seed", bench_seed, "Random seed");
  bench->add_option("--depth", bench_depth, "Tree depth")->check(CLI::PositiveNumber);
  bench->add_option("--skip", bench_skip, "Approximation parameter of the -skip variants");
  bench->add_option("--folds", bench_folds, "Cross-fitting folds");
  bench->add_option("--n-test", bench_n_test, "Evaluation points per run");
  bench->add_option("--ref-points", bench_ref_points, "Clean draws for the reference tree");
  bench->add_option("--ref-skip", bench_ref_skip, "Skip used for the reference tree search");
  bench->add_option("--threads", bench_threads, "Worker cap; 0 = all cores");
  bench->add_option("--out", bench_out, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_n, sim_seed, sim_out, sim_truth_out);
    if (fit->parsed()) return cmd_fit(fit_flags);
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_data, eval_tree, eval_tree2, eval_folds, eval_seed, eval_eta,
                          eval_out);
    }
    if (export_mip->parsed()) return cmd_export_mip(mip_data, mip_scores, mip_flags, mip_out);
    if (bench->parsed()) {
      return cmd_bench(bench_n_list, bench_methods, bench_runs, bench_seed, bench_depth,
                       bench_skip, bench_folds, bench_n_test, bench_ref_points, bench_ref_skip,
                       bench_threads, bench_out);
    }
  } catch (const opl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const opl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const opl::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const opl::NonFiniteValue& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const opl::ActionOutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const opl::InvalidPropensityRow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const opl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
