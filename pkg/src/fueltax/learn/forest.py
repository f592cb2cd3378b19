"""Bagged random-feature regression forest built on :mod:`fueltax.learn.tree`."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from fueltax.errors import ModelError
from fueltax.learn.tree import TreeModel, TreeParams, grow_tree


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 200
    m_features: int | None = None  # None: ceil(p / 3)
    bootstrap: bool = True
    min_leaf: int = 2
    max_depth: int | None = None
    min_split: int | None = None  # None: 2 * min_leaf

    def resolve(self, p: int) -> "ForestParams":
        m = self.m_features if self.m_features is not None else math.ceil(p / 3)
        min_split = self.min_split if self.min_split is not None else 2 * self.min_leaf
        if self.n_trees < 1:
            raise ModelError("n_trees must be >= 1")
        if not 1 <= m <= p:
            raise ModelError(f"m_features must be in [1, {p}], got {m}")
        resolved = ForestParams(self.n_trees, m, self.bootstrap, self.min_leaf, self.max_depth, min_split)
        resolved.tree_params()  # validates
        return resolved

    def tree_params(self) -> TreeParams:
        return TreeParams(self.max_depth, self.min_leaf, self.min_split)


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple[TreeModel, ...]
    params: ForestParams
    master_seed: int
    n_features: int
    oob_r2: float | None = None
    fingerprint: str | None = None

    kind = "forest"

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} columns, got shape {X.shape}")
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)


def tree_rng(master_seed: int, index: int) -> np.random.Generator:
    """Random stream for tree ``index``; depends on nothing else."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))


def _fit_one(args):
    X, y, params, master_seed, index = args
    rng = tree_rng(master_seed, index)
    n = X.shape[0]
    rows = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
    tree = grow_tree(X[rows], y[rows], params.tree_params(), rng=rng, m_features=params.m_features)
    return tree, rows


def fit_forest(X, y, params: ForestParams | None = None, master_seed: int = 0, workers: int = 1) -> ForestModel:
    """Fit ``params.n_trees`` trees, optionally across ``workers`` processes.

    The result is bit-identical for any worker count: tree ``i`` draws its
    bootstrap sample and split features only from ``(master_seed, i)``.
    Out-of-bag R^2 is computed when bootstrapping and stored for information.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ModelError(f"bad training shapes X{X.shape} y{y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ModelError("non-finite training data")
    params = (params or ForestParams()).resolve(X.shape[1])
    jobs = [(X, y, params, master_seed, i) for i in range(params.n_trees)]
    if workers > 1 and params.n_trees > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(_fit_one, jobs, chunksize=max(1, params.n_trees // (4 * workers))))
    else:
        fitted = [_fit_one(job) for job in jobs]
    trees = tuple(t for t, _ in fitted)
    oob = _oob_r2(X, y, fitted) if params.bootstrap else None
    return ForestModel(trees, params, int(master_seed), X.shape[1], oob)


def _oob_r2(X, y, fitted):
    n = X.shape[0]
    sums = np.zeros(n)
    hits = np.zeros(n, dtype=int)
    for tree, rows in fitted:
        out = np.ones(n, dtype=bool)
        out[rows] = False
        if out.any():
            sums[out] += tree.predict(X[out])
            hits[out] += 1
    seen = hits > 0
    if seen.sum() < 2:
        return None
    yt = y[seen]
    sst = float(np.sum((yt - yt.mean()) ** 2))
    if sst == 0:
        return None
    return 1.0 - float(np.sum((yt - sums[seen] / hits[seen]) ** 2)) / sst
