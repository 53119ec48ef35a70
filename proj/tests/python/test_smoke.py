"""End-to-end smoke tests of the opl_core python module."""

import json

import numpy as np
import pytest

import opl_core as opl


def test_dataset_roundtrip_and_validation():
    features = np.array([[0.1], [0.9]])
    ds = opl.Dataset(features, [0, 1], [1.0, 0.0])
    assert ds.n == 2
    assert ds.p == 1
    assert ds.num_actions == 2
    np.testing.assert_array_equal(ds.features, features)

    with pytest.raises(opl.OplError):
        opl.Dataset(features, [0, 2], [1.0, 0.0], num_actions=2)


def test_tree_assign_and_json():
    tree = opl.TreePolicy.branch(
        0, 0.5,
        opl.TreePolicy.branch(1, 0.4, opl.TreePolicy.leaf(0), opl.TreePolicy.leaf(2)),
        opl.TreePolicy.branch(1, 0.8, opl.TreePolicy.leaf(1), opl.TreePolicy.leaf(0)),
    )
    assert tree.assign(np.array([0.4, 0.5])) == 2
    assert tree.assign(np.array([0.5, 0.7])) == 1
    assert tree.depth == 3

    parsed = json.loads(tree.to_json())
    assert parsed["split_dim"] == 0
    back = opl.TreePolicy.from_json(tree.to_json())
    assert back == tree


def test_scores_and_policy_value():
    ds = opl.Dataset(np.zeros((1, 1)), [0], [1.0], num_actions=2)
    scores = opl.aipw_scores_from_predictions(
        ds, np.array([[0.4, 0.6]]), np.array([[0.5, 0.5]])
    )
    np.testing.assert_allclose(scores, [[1.6, 0.6]])

    ipw = opl.ipw_scores(ds, np.array([[0.5, 0.5]]))
    np.testing.assert_allclose(ipw, [[2.0, 0.0]])

    assert opl.policy_value(np.array([[1.0, 0.0], [0.0, 2.0]]), [0, 1]) == 1.5


def test_search_tree_matches_simple_instance():
    features = np.array([[0.1], [0.2], [0.8], [0.9]])
    scores = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    value, tree = opl.search_tree(features, scores, depth=2)
    assert value == 4.0
    assert not tree.is_leaf
    assert tree.assign(np.array([0.1])) == 0
    assert tree.assign(np.array([0.9])) == 1

    greedy_value, _ = opl.greedy_tree(features, scores, depth=2)
    assert greedy_value == 4.0


def test_full_pipeline_on_synthetic_data():
    ds, truth = opl.generate_synthetic(300, seed=7)
    assert truth.region_of(np.array([0.5] * 4 + [0.3] + [0.5] + [0.5, 0.5, 0.5, 0.5])) in (0, 1, 2)

    tree, value, scores = opl.caipwl_fit(ds, folds=5, seed=3, depth=2)
    assert scores.shape == (300, 3)
    assignments = tree.assign_all(ds.features)
    assert value / 300 == pytest.approx(opl.policy_value(scores, assignments))

    points = opl.sample_features(2000, seed=11)
    regret = opl.regret_against(truth, tree, points)
    assert regret >= 0.0

    tree2, _, _ = opl.ipwl_fit(ds, folds=5, seed=3, depth=2)
    ttest = opl.value_difference_ttest(scores, tree, tree2, ds.features)
    assert 0.0 <= ttest["p_value"] <= 1.0

    report = opl.test_value_report(scores, tree, ds.features)
    assert report["n_test"] == 300


def test_nuisance_fit_cross_fitting():
    ds, _ = opl.generate_synthetic(200, seed=9)
    nf = opl.fit_cross_fitted_nuisances(ds, folds=4, seed=2)
    assert nf.propensities_known
    e = nf.cross_fitted_propensities(ds)
    np.testing.assert_array_equal(e, ds.propensities)
    mu = nf.cross_fitted_outcomes(ds)
    assert mu.shape == (200, 3)

    scores = opl.aipw_scores(ds, nf)
    assert scores.shape == (200, 3)


def test_mip_export(tmp_path):
    ds, _ = opl.generate_synthetic(500, seed=13)
    scores = np.zeros((500, 3))
    model = opl.build_mip(ds.features, scores, depth=3)
    assert model.variable_count == 2045

    path = tmp_path / "model.lp"
    model.write_lp(str(path))
    text = path.read_text()
    assert text.startswith("\\ policy tree MIP")
    assert "Binaries" in text


def test_statistics():
    assert opl.student_t_two_sided_p(1.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    assert opl.kappa_bound(2, 2, 2) == pytest.approx(4.9490886458795063, abs=1e-12)
    assert opl.make_folds(10, 5, seed=3) == opl.make_folds(10, 5, seed=3)
    np.testing.assert_allclose(opl.clip_propensities([0.05, 0.95], 0.1), [0.1, 0.95])


def test_hamming_distance():
    t1 = opl.TreePolicy.branch(0, 0.5, opl.TreePolicy.leaf(0), opl.TreePolicy.leaf(1))
    t2 = opl.TreePolicy.leaf(0)
    pts = np.array([[0.2], [0.4], [0.6], [0.8]])
    assert opl.hamming_distance(t1, t2, pts) == 0.5
    assert opl.hamming_distance(t1, t1, pts) == 0.0
