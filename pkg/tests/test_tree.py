import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import exhaustive_tree, tree_predict
from fueltax.errors import ModelError
from fueltax.learn.tree import TreeModel, best_split, fit_tree


def random_instance(rng):
    n = int(rng.integers(2, 21))
    p = int(rng.integers(1, 4))
    if rng.random() < 0.5:
        # small integers: many repeated values and exactly tied gains
        X = rng.integers(0, 4, size=(n, p)).astype(float)
        y = rng.integers(0, 10, size=n).astype(float)
    else:
        X = rng.normal(size=(n, p))
        y = rng.normal(size=n)
    min_leaf = int(rng.integers(1, 4))
    min_split = int(rng.integers(1, 6))
    max_depth = None if rng.random() < 0.5 else int(rng.integers(0, 5))
    return X, y, max_depth, min_leaf, min_split


def test_four_points():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 10.0, 10.0])
    assert best_split(X, y)[:2] == (0, 1.5)
    tree = fit_tree(X, y, max_depth=None, min_leaf=1, min_split=2)
    assert tree.threshold[0] == 1.5
    assert sorted(tree.value[[tree.left[0], tree.right[0]]]) == [0.0, 10.0]
    assert tree.n_leaves == 2


def test_constant_target_is_one_leaf():
    X = np.random.default_rng(0).normal(size=(30, 3))
    tree = fit_tree(X, np.full(30, 2.5))
    assert tree.n_nodes == 1 and tree.value[0] == 2.5
    assert np.all(tree.predict(X) == 2.5)


def test_min_leaf_n_forces_root_leaf():
    rng = np.random.default_rng(3)
    X, y = rng.normal(size=(12, 2)), rng.normal(size=12)
    tree = fit_tree(X, y, min_leaf=12, min_split=1)
    assert tree.n_nodes == 1
    assert tree.value[0] == pytest.approx(y.mean(), abs=1e-15)


def test_tie_goes_to_lowest_feature():
    # features 0 and 1 give the same partition; feature 2 is worse
    X = np.array([[0, 5, 0], [0, 5, 1], [1, 9, 0], [1, 9, 1]], dtype=float)
    y = np.array([0, 0, 1, 1], dtype=float)
    assert best_split(X, y)[:2] == (0, 0.5)
    assert best_split(X[:, [1, 0, 2]], y)[:2] == (0, 7.0)


def test_tie_goes_to_lowest_threshold():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([0.0, 1.0, 2.0])
    # both cuts reduce the squared error by the same amount
    assert best_split(X, y)[:2] == (0, 0.5)


def test_depth_limit():
    rng = np.random.default_rng(8)
    X, y = rng.normal(size=(200, 3)), rng.normal(size=200)
    for depth in range(4):
        assert fit_tree(X, y, max_depth=depth, min_leaf=1, min_split=2).depth <= depth


@pytest.mark.parametrize("seed", range(100))
def test_matches_exhaustive_enumeration(seed):
    X, y, max_depth, min_leaf, min_split = random_instance(np.random.default_rng(seed))
    tree = fit_tree(X, y, max_depth, min_leaf, min_split)
    oracle = exhaustive_tree(X, y, max_depth, min_leaf, min_split)
    expected = np.array([tree_predict(oracle, row) for row in X])
    assert np.array_equal(tree.predict(X), expected)


def test_leaf_counts_and_values_agree():
    rng = np.random.default_rng(4)
    X, y = rng.normal(size=(300, 4)), rng.normal(size=300)
    tree = fit_tree(X, y, max_depth=None, min_leaf=3, min_split=6)
    leaves = tree.feature == -1
    assert tree.count[0] == 300 and tree.count[leaves].sum() == 300
    assert np.all(tree.count[leaves] >= 3)


@given(st.integers(2, 60), st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_interpolates_distinct_rows(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = rng.normal(size=n)
    tree = fit_tree(X, y, max_depth=None, min_leaf=1, min_split=1)
    assert np.array_equal(tree.predict(X), y)


def test_predict_checks_width():
    tree = fit_tree(np.zeros((4, 2)), np.arange(4.0))
    with pytest.raises(ModelError):
        tree.predict(np.zeros((1, 3)))


def test_single_leaf_model_predicts_its_value():
    leaf = TreeModel(
        np.array([-1]), np.zeros(1), np.array([-1]), np.array([-1]), np.array([7.5]), np.array([1]), n_features=3
    )
    assert np.all(leaf.predict(np.random.default_rng(0).normal(size=(5, 3))) == 7.5)


def test_rejects_non_finite():
    with pytest.raises(ModelError):
        fit_tree([[np.inf]], [1.0])
