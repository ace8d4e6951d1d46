import numpy as np
import pytest

from conftest import random_gbt, random_tree
from macrosent.errors import DataError
from macrosent.explain import (
    ShapMatrix,
    exact_shapley,
    expected_margin,
    linear_contributions,
    save_shap_csv,
    shap_global_ranking,
    tree_shap,
)
from macrosent.models.boosting import BoostedTreesClassifier
from macrosent.models.logistic import LogisticClassifier
from macrosent.models.tree import RegressionTree


def stump(feature=0, threshold=0.0, left_value=-1.0, right_value=2.0,
          left_cover=3.0, right_cover=7.0):
    return RegressionTree(
        feature=np.array([feature, -1, -1]),
        threshold=np.array([threshold, 0.0, 0.0]),
        left=np.array([1, -1, -1]),
        right=np.array([2, -1, -1]),
        value=np.array([0.0, left_value, right_value]),
        cover=np.array([left_cover + right_cover, left_cover, right_cover]),
    )


def gbt_from_trees(trees, n_features, learning_rate=0.1, base_score=0.0):
    model = BoostedTreesClassifier(learning_rate=learning_rate)
    model.base_score_ = base_score
    model.trees_ = trees
    model.n_features_in_ = n_features
    return model


def test_zero_tree_model():
    model = gbt_from_trees([], n_features=3, base_score=0.7)
    shap = tree_shap(model, np.zeros((4, 3)))
    assert np.array_equal(shap.values, np.zeros((4, 3)))
    assert shap.base_value == 0.7


def test_stump_closed_form_and_oracle():
    # For a single stump the attribution goes entirely to the split feature and
    # equals (own-leaf value - cover-weighted mean leaf value) * learning_rate.
    model = gbt_from_trees([stump()], n_features=3, learning_rate=0.5)
    x = np.array([1.0, 5.0, -2.0])  # goes right
    shap = tree_shap(model, x)
    mean_leaf = (3.0 * -1.0 + 7.0 * 2.0) / 10.0
    expected = 0.5 * (2.0 - mean_leaf)
    assert shap.values[0, 0] == pytest.approx(expected, abs=1e-12)
    assert shap.values[0, 1] == 0.0 and shap.values[0, 2] == 0.0
    oracle = exact_shapley(model, x)
    assert np.allclose(shap.values[0], oracle, atol=1e-12)


def test_oracle_equivalence_random_models():
    rng = np.random.default_rng(123)
    for _ in range(10):
        d = int(rng.integers(1, 9))
        model = random_gbt(rng, d, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        X = rng.normal(size=(5, d))
        shap = tree_shap(model, X)
        for i in range(5):
            oracle = exact_shapley(model, X[i])
            assert np.abs(shap.values[i] - oracle).max() <= 1e-9


def test_efficiency_identity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        d = int(rng.integers(1, 7))
        model = random_gbt(rng, d, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        X = rng.normal(size=(8, d))
        shap = tree_shap(model, X)
        margins = model.raw_margin(X)
        recon = shap.base_value + shap.values.sum(axis=1)
        assert np.abs(recon - margins).max() <= 1e-6


def test_symmetry_axiom():
    # Two trees using features 0 and 1 identically; a symmetric input must split
    # credit equally.
    trees = [stump(feature=0), stump(feature=1)]
    model = gbt_from_trees(trees, n_features=2)
    shap = tree_shap(model, np.array([0.3, 0.3]))
    assert shap.values[0, 0] == pytest.approx(shap.values[0, 1], abs=1e-12)


def test_dummy_axiom_exact_zero():
    rng = np.random.default_rng(11)
    model = random_gbt(rng, n_features=3, n_trees=4, max_depth=3)
    # force every split onto features 0 and 1 so feature 2 is a dummy
    for tree in model.trees_:
        internal = tree.feature >= 0
        tree.feature[internal] = tree.feature[internal] % 2
    X = rng.normal(size=(6, 3))
    shap = tree_shap(model, X)
    assert np.array_equal(shap.values[:, 2], np.zeros(6))
    assert exact_shapley(model, X[0])[2] == 0.0


def test_additivity_across_trees():
    rng = np.random.default_rng(13)
    t1 = random_tree(rng, 4, 3)
    t2 = random_tree(rng, 4, 3)
    x = rng.normal(size=4)
    both = tree_shap(gbt_from_trees([t1, t2], 4), x).values[0]
    alone = (tree_shap(gbt_from_trees([t1], 4), x).values[0]
             + tree_shap(gbt_from_trees([t2], 4), x).values[0])
    assert np.allclose(both, alone, atol=1e-12)


def test_base_value_is_cover_weighted_expectation():
    model = gbt_from_trees([stump()], n_features=1, learning_rate=0.5, base_score=0.1)
    assert expected_margin(model) == pytest.approx(0.1 + 0.5 * (0.3 * -1.0 + 0.7 * 2.0), abs=1e-12)


def test_exact_shapley_feature_cap():
    rng = np.random.default_rng(17)
    model = random_gbt(rng, n_features=13, n_trees=1, max_depth=2)
    with pytest.raises(ValueError, match="12"):
        exact_shapley(model, np.zeros(13))


def test_feature_count_mismatch():
    model = gbt_from_trees([stump()], n_features=3)
    with pytest.raises(ValueError, match="mismatch"):
        tree_shap(model, np.zeros((2, 4)))


def test_ranking_single_active_feature():
    shap = ShapMatrix(
        dates=[0, 1], feature_names=("a", "b", "c"),
        values=np.array([[0.0, 0.4, 0.0], [0.0, -0.2, 0.0]]),
        base_value=0.0, feature_values=np.zeros((2, 3)), method="test",
    )
    ranking = shap_global_ranking(shap)
    assert ranking[0] == ("b", pytest.approx(0.3))
    assert [name for name, _ in ranking[1:]] == ["a", "c"]


def test_ranking_all_zero_alphabetical():
    shap = ShapMatrix(
        dates=[0], feature_names=("z", "m", "a"),
        values=np.zeros((1, 3)), base_value=0.0,
        feature_values=np.zeros((1, 3)), method="test",
    )
    assert [name for name, _ in shap_global_ranking(shap)] == ["a", "m", "z"]


def test_ranking_hand_example():
    shap = ShapMatrix(
        dates=[0, 1], feature_names=("f1", "f2"),
        values=np.array([[0.3, 0.5], [-0.1, -0.5]]),
        base_value=0.0, feature_values=np.zeros((2, 2)), method="test",
    )
    ranking = shap_global_ranking(shap)
    assert ranking == [("f2", pytest.approx(0.5)), ("f1", pytest.approx(0.2))]


def test_linear_contributions_exact_efficiency():
    rng = np.random.default_rng(19)
    X = rng.normal(size=(30, 4))
    y = (X[:, 0] - X[:, 1] > 0).astype(int)
    model = LogisticClassifier(C=10.0).fit(X, y)
    contrib = linear_contributions(model, X)
    margins = model.decision_function(X)
    recon = contrib.base_value + contrib.values.sum(axis=1)
    assert np.abs(recon - margins).max() < 1e-10
    assert contrib.method == "linear_coefficient_zscore"


def test_shap_csv_layout(tmp_path):
    model = gbt_from_trees([stump()], n_features=2)
    shap = tree_shap(model, np.array([[1.0, 0.0], [-1.0, 0.5]]),
                     feature_names=("alpha", "beta"))
    path = tmp_path / "shap.csv"
    save_shap_csv(shap, path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# base_value,")
    assert lines[1] == "date,feature,shap_value,feature_value"
    assert len(lines) == 2 + 2 * 2


def test_empty_ranking_rejected():
    shap = ShapMatrix(dates=[], feature_names=(), values=np.zeros((0, 0)),
                      base_value=0.0, feature_values=np.zeros((0, 0)), method="test")
    with pytest.raises(DataError):
        shap_global_ranking(shap)
