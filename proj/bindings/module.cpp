#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "opl/benchmark.hpp"
#include "opl/dataset.hpp"
#include "opl/errors.hpp"
#include "opl/evaluation.hpp"
#include "opl/folds.hpp"
#include "opl/mip.hpp"
#include "opl/nuisance.hpp"
#include "opl/scoring.hpp"
#include "opl/simulation.hpp"
#include "opl/tree.hpp"
#include "opl/tree_search.hpp"

namespace py = pybind11;

namespace {

opl::Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw opl::DimensionMismatch("expected a 2-D array");
  opl::Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
  std::copy(arr.data(), arr.data() + arr.size(), m.data().begin());
  return m;
}

py::array_t<double> to_numpy(const opl::Matrix& m) {
  py::array_t<double> arr({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), arr.mutable_data());
  return arr;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 1) throw opl::DimensionMismatch("expected a 1-D array");
  return {arr.data(), arr.data() + arr.size()};
}

opl::ScoreMatrix to_scores(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  return {to_matrix(arr)};
}

opl::SearchConfig make_search_config(int depth, int skip, bool parallel, int threads) {
  return {depth, skip, parallel, threads, false};
}

opl::NuisanceConfig make_nuisance_config(std::optional<double> eta, int k_neighbors,
                                         double l2, int max_iter, double tol) {
  opl::NuisanceConfig config;
  config.eta_floor = eta;
  config.knn.k_neighbors = k_neighbors;
  config.logit.l2 = l2;
  config.logit.max_iter = max_iter;
  config.logit.tol = tol;
  return config;
}

}  // namespace

PYBIND11_MODULE(opl_core, m) {
  m.doc() = "Offline multi-action policy learning: doubly robust scores, "
            "optimal decision-tree policies, MIP export, evaluation.";

  py::register_exception<opl::Error>(m, "OplError");

  py::class_<opl::ObservationalDataset>(m, "Dataset")
      .def(py::init([](py::array_t<double, py::array::c_style | py::array::forcecast> features,
                       std::vector<int> actions, std::vector<double> rewards,
                       std::optional<py::array_t<double, py::array::c_style | py::array::forcecast>>
                           propensities,
                       int num_actions) {
             opl::ObservationalDataset ds;
             ds.features = to_matrix(features);
             ds.actions = std::move(actions);
             ds.rewards = std::move(rewards);
             if (propensities) ds.known_propensities = to_matrix(*propensities);
             if (num_actions > 0) {
               ds.num_actions = num_actions;
             } else if (ds.known_propensities) {
               ds.num_actions = static_cast<int>(ds.known_propensities->cols());
             } else {
               int max_action = 0;
               for (int a : ds.actions) max_action = std::max(max_action, a);
               ds.num_actions = max_action + 1;
             }
             return opl::validate_dataset(std::move(ds));
           }),
           py::arg("features"), py::arg("actions"), py::arg("rewards"),
           py::arg("propensities") = std::nullopt, py::arg("num_actions") = 0)
      .def_property_readonly("n", &opl::ObservationalDataset::size)
      .def_property_readonly("p", &opl::ObservationalDataset::feature_dim)
      .def_property_readonly("num_actions",
                             [](const opl::ObservationalDataset& ds) { return ds.num_actions; })
      .def_property_readonly("features",
                             [](const opl::ObservationalDataset& ds) { return to_numpy(ds.features); })
      .def_property_readonly("actions",
                             [](const opl::ObservationalDataset& ds) { return ds.actions; })
      .def_property_readonly("rewards",
                             [](const opl::ObservationalDataset& ds) { return ds.rewards; })
      .def_property_readonly("propensities",
                             [](const opl::ObservationalDataset& ds) -> py::object {
                               if (!ds.known_propensities) return py::none();
                               return to_numpy(*ds.known_propensities);
                             });

  py::class_<opl::TreePolicy>(m, "TreePolicy")
      .def_static("leaf", &opl::TreePolicy::leaf, py::arg("action"))
      .def_static("branch", &opl::TreePolicy::branch, py::arg("split_dim"),
                  py::arg("split_value"), py::arg("left"), py::arg("right"))
      .def_property_readonly("is_leaf", &opl::TreePolicy::is_leaf)
      .def_property_readonly("depth", &opl::TreePolicy::depth)
      .def("assign",
           [](const opl::TreePolicy& t,
              py::array_t<double, py::array::c_style | py::array::forcecast> x) {
             const auto v = to_vector(x);
             return t.assign(v);
           },
           py::arg("x"))
      .def("assign_all",
           [](const opl::TreePolicy& t,
              py::array_t<double, py::array::c_style | py::array::forcecast> points) {
             return opl::assign_all(t, to_matrix(points));
           },
           py::arg("points"))
      .def("to_json", &opl::TreePolicy::to_json)
      .def_static("from_json", &opl::TreePolicy::from_json, py::arg("text"))
      .def("pretty", &opl::TreePolicy::pretty)
      .def("__eq__", [](const opl::TreePolicy& a, const opl::TreePolicy& b) { return a == b; })
      .def("__repr__", [](const opl::TreePolicy& t) {
        return "TreePolicy(depth=" + std::to_string(t.depth()) + ")";
      });

  m.def("hamming_distance",
        [](const opl::TreePolicy& a, const opl::TreePolicy& b,
           py::array_t<double, py::array::c_style | py::array::forcecast> points) {
          return opl::hamming_distance(a, b, to_matrix(points));
        },
        py::arg("tree1"), py::arg("tree2"), py::arg("points"));

  m.def("make_folds",
        [](std::size_t n, int num_folds, std::uint64_t seed) {
          return opl::make_folds(n, num_folds, seed).fold_of;
        },
        py::arg("n"), py::arg("num_folds"), py::arg("seed"));

  py::class_<opl::NuisanceFit>(m, "NuisanceFit")
      .def_property_readonly("num_folds", &opl::NuisanceFit::num_folds)
      .def_property_readonly("eta_floor", &opl::NuisanceFit::eta_floor)
      .def_property_readonly("propensities_known", &opl::NuisanceFit::propensities_known)
      .def("cross_fitted_outcomes",
           [](const opl::NuisanceFit& nf, const opl::ObservationalDataset& ds) {
             return to_numpy(nf.cross_fitted_outcomes(ds));
           })
      .def("cross_fitted_propensities",
           [](const opl::NuisanceFit& nf, const opl::ObservationalDataset& ds) {
             return to_numpy(nf.cross_fitted_propensities(ds));
           });

  m.def("fit_cross_fitted_nuisances",
        [](const opl::ObservationalDataset& ds, int folds, std::uint64_t seed,
           std::optional<double> eta, int k_neighbors, double l2, int max_iter, double tol) {
          return opl::fit_cross_fitted_nuisances(
              ds, folds, seed, make_nuisance_config(eta, k_neighbors, l2, max_iter, tol));
        },
        py::arg("dataset"), py::arg("folds") = 5, py::arg("seed") = 1,
        py::arg("eta") = std::nullopt, py::arg("k_neighbors") = 0, py::arg("l2") = 1e-4,
        py::arg("max_iter") = 10000, py::arg("tol") = 1e-8);

  m.def("aipw_scores",
        [](const opl::ObservationalDataset& ds, const opl::NuisanceFit& nf) {
          return to_numpy(opl::aipw_scores(ds, nf).values);
        },
        py::arg("dataset"), py::arg("nuisances"));
  m.def("aipw_scores_from_predictions",
        [](const opl::ObservationalDataset& ds,
           py::array_t<double, py::array::c_style | py::array::forcecast> mu,
           py::array_t<double, py::array::c_style | py::array::forcecast> e) {
          return to_numpy(opl::aipw_scores_from_predictions(ds, to_matrix(mu), to_matrix(e)).values);
        },
        py::arg("dataset"), py::arg("mu_hat"), py::arg("e_hat"));
  m.def("ipw_scores",
        [](const opl::ObservationalDataset& ds,
           py::array_t<double, py::array::c_style | py::array::forcecast> propensities) {
          return to_numpy(opl::ipw_scores(ds, to_matrix(propensities)).values);
        },
        py::arg("dataset"), py::arg("propensities"));
  m.def("policy_value",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores,
           std::vector<int> assignments) {
          return opl::policy_value(to_scores(scores), assignments);
        },
        py::arg("scores"), py::arg("assignments"));
  m.def("clip_propensities", &opl::clip_propensities, py::arg("p"), py::arg("eta"));

  m.def("search_tree",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> features,
           py::array_t<double, py::array::c_style | py::array::forcecast> scores, int depth,
           int skip, bool parallel, int threads) {
          const auto result = opl::search_tree(to_matrix(features), to_scores(scores),
                                               make_search_config(depth, skip, parallel, threads));
          return py::make_tuple(result.value, result.tree);
        },
        py::arg("features"), py::arg("scores"), py::arg("depth") = 3, py::arg("skip") = 1,
        py::arg("parallel") = false, py::arg("threads") = 0);
  m.def("greedy_tree",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> features,
           py::array_t<double, py::array::c_style | py::array::forcecast> scores, int depth) {
          const auto result = opl::greedy_tree(to_matrix(features), to_scores(scores), depth);
          return py::make_tuple(result.value, result.tree);
        },
        py::arg("features"), py::arg("scores"), py::arg("depth") = 3);

  m.def("caipwl_fit",
        [](const opl::ObservationalDataset& ds, int folds, std::uint64_t seed, int depth,
           int skip, std::optional<double> eta, bool parallel, int threads) {
          auto result = opl::caipwl_fit(ds, folds, seed,
                                        make_nuisance_config(eta, 0, 1e-4, 10000, 1e-8),
                                        make_search_config(depth, skip, parallel, threads));
          return py::make_tuple(result.tree, result.value, to_numpy(result.scores.values));
        },
        py::arg("dataset"), py::arg("folds") = 5, py::arg("seed") = 1, py::arg("depth") = 3,
        py::arg("skip") = 1, py::arg("eta") = std::nullopt, py::arg("parallel") = false,
        py::arg("threads") = 0);
  m.def("ipwl_fit",
        [](const opl::ObservationalDataset& ds, int folds, std::uint64_t seed, int depth,
           int skip, std::optional<double> eta, bool parallel, int threads) {
          auto result = opl::ipwl_fit(ds, folds, seed,
                                      make_nuisance_config(eta, 0, 1e-4, 10000, 1e-8),
                                      make_search_config(depth, skip, parallel, threads));
          return py::make_tuple(result.tree, result.value, to_numpy(result.scores.values));
        },
        py::arg("dataset"), py::arg("folds") = 5, py::arg("seed") = 1, py::arg("depth") = 3,
        py::arg("skip") = 1, py::arg("eta") = std::nullopt, py::arg("parallel") = false,
        py::arg("threads") = 0);

  py::class_<opl::SyntheticTruth>(m, "SyntheticTruth")
      .def(py::init<>())
      .def("region_of",
           [](const opl::SyntheticTruth& t,
              py::array_t<double, py::array::c_style | py::array::forcecast> x) {
             return t.region_of(to_vector(x));
           })
      .def("mean_reward",
           [](const opl::SyntheticTruth& t,
              py::array_t<double, py::array::c_style | py::array::forcecast> x, int action) {
             return t.mean_reward(to_vector(x), action);
           })
      .def("optimal_action",
           [](const opl::SyntheticTruth& t,
              py::array_t<double, py::array::c_style | py::array::forcecast> x) {
             return t.optimal_action(to_vector(x));
           });

  m.def("generate_synthetic",
        [](std::size_t n, std::uint64_t seed) {
          auto [ds, truth] = opl::generate_synthetic(n, seed);
          return py::make_tuple(std::move(ds), truth);
        },
        py::arg("n"), py::arg("seed") = 1);
  m.def("sample_features",
        [](std::size_t n, std::uint64_t seed) { return to_numpy(opl::sample_features(n, seed)); },
        py::arg("n"), py::arg("seed") = 1);

  m.def("test_value_report",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores,
           const opl::TreePolicy& tree,
           py::array_t<double, py::array::c_style | py::array::forcecast> features) {
          const auto report = opl::test_value_report(to_scores(scores), tree, to_matrix(features));
          py::dict out;
          out["value"] = report.value;
          out["std_error"] = report.std_error;
          out["n_test"] = report.n_test;
          out["per_obs"] = report.per_obs;
          return out;
        },
        py::arg("scores"), py::arg("tree"), py::arg("features"));
  m.def("value_difference_ttest",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> scores,
           const opl::TreePolicy& t1, const opl::TreePolicy& t2,
           py::array_t<double, py::array::c_style | py::array::forcecast> features) {
          const auto result =
              opl::value_difference_ttest(to_scores(scores), t1, t2, to_matrix(features));
          py::dict out;
          out["mean_diff"] = result.mean_diff;
          out["t_stat"] = result.t_stat;
          out["p_value"] = result.p_value;
          out["degenerate_variance"] = result.degenerate_variance;
          return out;
        },
        py::arg("scores"), py::arg("tree1"), py::arg("tree2"), py::arg("features"));
  m.def("student_t_two_sided_p", &opl::student_t_two_sided_p, py::arg("t"), py::arg("df"));
  m.def("regret_against",
        [](const opl::SyntheticTruth& truth, const opl::TreePolicy& tree,
           py::array_t<double, py::array::c_style | py::array::forcecast> points) {
          return opl::regret_against(truth, tree, to_matrix(points));
        },
        py::arg("truth"), py::arg("tree"), py::arg("points"));
  m.def("kappa_bound", &opl::kappa_bound, py::arg("depth"), py::arg("p"), py::arg("d"));

  py::class_<opl::MipModel>(m, "MipModel")
      .def_property_readonly("variable_count", &opl::MipModel::variable_count)
      .def_property_readonly("epsilon", [](const opl::MipModel& model) { return model.epsilon; })
      .def_property_readonly("eps_max", [](const opl::MipModel& model) { return model.eps_max; })
      .def("write_lp",
           [](const opl::MipModel& model, const std::string& path) { opl::write_lp(model, path); },
           py::arg("path"));

  m.def("build_mip",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> features,
           py::array_t<double, py::array::c_style | py::array::forcecast> scores, int depth) {
          return opl::build_mip(to_matrix(features), to_scores(scores), depth);
        },
        py::arg("features"), py::arg("scores"), py::arg("depth") = 3);
  m.def("epsilon_vector",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> normalized) {
          return opl::epsilon_vector(to_matrix(normalized));
        },
        py::arg("normalized_features"));
}
