"""Greedy CART regression tree.

Splits maximise the reduction in sum of squared errors. Candidate
thresholds are midpoints between consecutive distinct values of a feature;
rows with ``x <= threshold`` go left. Ties in gain go to the lowest feature
index, then the lowest threshold. Gains within ``GAIN_RTOL`` of the node's
total sum of squares count as ties, so the choice does not depend on the
order in which sums happen to be accumulated.

The growth loop is compiled with numba. A node's value is the mean of its
training targets, summed left to right in ascending row order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from fueltax.errors import ModelError

GAIN_RTOL = 1e-10
LEAF = -1


@dataclass(frozen=True)
class TreeParams:
    max_depth: int | None = 12
    min_leaf: int = 5
    min_split: int = 10

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ModelError("max_depth must be >= 0 or None")
        if self.min_leaf < 1 or self.min_split < 1:
            raise ModelError("min_leaf and min_split must be >= 1")


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Flat array encoding of a fitted tree; node 0 is the root.

    For a leaf ``feature == -1`` and ``left``/``right`` are -1.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    count: np.ndarray
    n_features: int
    params: TreeParams = field(default_factory=TreeParams)
    fingerprint: str | None = None

    kind = "tree"

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} columns, got shape {X.shape}")
        node = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            active = np.nonzero(self.feature[node] != LEAF)[0]
            if active.size == 0:
                return self.value[node].copy()
            current = node[active]
            go_left = X[active, self.feature[current]] <= self.threshold[current]
            node[active] = np.where(go_left, self.left[current], self.right[current])


@njit(cache=True)
def _scan_splits(X, y, idx, features, min_leaf, rtol, gains, yc, xs):
    """Return ``(j, lo, hi, gain)`` for the chosen split, ``j = -1`` if none.

    ``gains``, ``yc`` and ``xs`` are scratch buffers of length at least
    ``len(features) * len(idx)``, ``len(idx)`` and ``len(idx)``.
    """
    k = idx.shape[0]
    m = features.shape[0]
    mean = 0.0
    for i in range(k):
        mean += y[idx[i]]
    mean /= k
    sst = 0.0
    for i in range(k):
        yc[i] = y[idx[i]] - mean
        sst += yc[i] * yc[i]
    if sst <= 0.0:
        return -1, 0.0, 0.0, 0.0
    best = -np.inf
    for j in range(m):
        f = features[j]
        row = gains[j * (k - 1) : (j + 1) * (k - 1)]
        lo_all = np.inf
        hi_all = -np.inf
        for i in range(k):
            v = X[idx[i], f]
            xs[i] = v
            lo_all = min(lo_all, v)
            hi_all = max(hi_all, v)
        if not lo_all < hi_all:
            row[:] = -np.inf
            continue
        # two-valued columns (the indicators) have one candidate: no sort needed
        n_lo = 0
        lo_sum = 0.0
        total = 0.0
        binary = True
        for i in range(k):
            v = xs[i]
            total += yc[i]
            if v == lo_all:
                n_lo += 1
                lo_sum += yc[i]
            elif v != hi_all:
                binary = False
                break
        if binary:
            row[:] = -np.inf
            n_hi = k - n_lo
            if n_lo >= min_leaf and n_hi >= min_leaf:
                right = total - lo_sum
                g = lo_sum * lo_sum / n_lo + right * right / n_hi - total * total / k
                row[n_lo - 1] = g
                if g > best:
                    best = g
            continue
        order = np.argsort(xs[:k], kind="mergesort")
        total = 0.0
        for i in range(k):
            total += yc[order[i]]
        left = 0.0
        for pos in range(k - 1):
            left += yc[order[pos]]
            n_left = pos + 1
            n_right = k - n_left
            if n_left < min_leaf or n_right < min_leaf or not xs[order[pos]] < xs[order[pos + 1]]:
                row[pos] = -np.inf
                continue
            right = total - left
            g = left * left / n_left + right * right / n_right - total * total / k
            row[pos] = g
            if g > best:
                best = g
    tol = rtol * sst
    if not best > tol:
        return -1, 0.0, 0.0, 0.0
    # feature-major scan: first hit has the lowest feature, then lowest threshold
    for j in range(m):
        for pos in range(k - 1):
            g = gains[j * (k - 1) + pos]
            if g >= best - tol:
                f = features[j]
                for i in range(k):
                    xs[i] = X[idx[i], f]
                order = np.argsort(xs[:k], kind="mergesort")
                return j, xs[order[pos]], xs[order[pos + 1]], g
    return -1, 0.0, 0.0, 0.0


@njit(cache=True)
def _midpoint(lo, hi):
    t = 0.5 * (lo + hi)
    if lo < t and t < hi:
        return t
    return lo


@njit(cache=True)
def _grow(X, y, max_depth, min_leaf, min_split, keys, m, rtol):
    n, p = X.shape
    cap = 2 * n
    feature = np.full(cap, -1, dtype=np.intp)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.intp)
    right = np.full(cap, -1, dtype=np.intp)
    start = np.zeros(cap, dtype=np.intp)
    stop = np.zeros(cap, dtype=np.intp)
    rows = np.arange(n)
    buf = np.empty(n, dtype=np.intp)
    stack_node = np.empty(cap, dtype=np.intp)
    stack_depth = np.empty(cap, dtype=np.intp)
    all_features = np.arange(p)
    sampled = m < p
    gains = np.empty(max(m, 1) * n)
    yc = np.empty(n)
    xs = np.empty(n)

    stop[0] = n
    n_nodes = 1
    sp = 1
    stack_node[0] = 0
    stack_depth[0] = 0
    draws = 0
    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        depth = stack_depth[sp]
        a = start[node]
        b = stop[node]
        k = b - a
        if k < min_split or (max_depth >= 0 and depth >= max_depth):
            continue
        if k < 2 or k < 2 * min_leaf:
            continue
        if sampled:
            features = np.sort(np.argsort(keys[draws], kind="mergesort")[:m])
            draws += 1
        else:
            features = all_features
        j, lo, hi, gain = _scan_splits(X, y, rows[a:b], features, min_leaf, rtol, gains, yc, xs)
        if j < 0:
            continue
        f = features[j]
        t = _midpoint(lo, hi)
        # stable partition keeps each node's rows in ascending order
        nl = 0
        for i in range(a, b):
            if X[rows[i], f] <= t:
                rows[a + nl] = rows[i]
                nl += 1
            else:
                buf[i - a - nl] = rows[i]
        for i in range(k - nl):
            rows[a + nl + i] = buf[i]
        feature[node] = f
        threshold[node] = t
        li = n_nodes
        ri = n_nodes + 1
        n_nodes += 2
        left[node] = li
        right[node] = ri
        start[li] = a
        stop[li] = a + nl
        start[ri] = a + nl
        stop[ri] = b
        stack_node[sp] = ri
        stack_depth[sp] = depth + 1
        stack_node[sp + 1] = li
        stack_depth[sp + 1] = depth + 1
        sp += 2
    value = np.empty(n_nodes)
    for node in range(n_nodes):
        total = 0.0
        for i in range(start[node], stop[node]):
            total += y[rows[i]]
        value[node] = total / (stop[node] - start[node])
    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        value,
        stop[:n_nodes] - start[:n_nodes],
    )


def best_split(X, y, features=None, min_leaf=1):
    """Split chosen for a single node holding all rows of ``X``, or ``None``.

    Returns ``(feature, threshold, gain)``. ``features`` must be sorted
    ascending; the tie-break relies on it.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    features = np.arange(X.shape[1]) if features is None else np.asarray(features, dtype=np.intp)
    if y.shape[0] < max(2, 2 * min_leaf):
        return None
    k = y.shape[0]
    scratch = (np.empty(len(features) * k), np.empty(k), np.empty(k))
    j, lo, hi, gain = _scan_splits(X, y, np.arange(k), features, min_leaf, GAIN_RTOL, *scratch)
    if j < 0:
        return None
    return int(features[j]), float(_midpoint(lo, hi)), float(gain)


def grow_tree(X, y, params: TreeParams, rng=None, m_features=None) -> TreeModel:
    """Fit a tree; with ``rng`` and ``m_features`` each split sees a fresh random feature subset."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n, p = X.shape
    if n == 0:
        raise ModelError("cannot fit a tree on an empty training set")
    m = p if m_features is None else int(m_features)
    if m < p:
        # one row of uniform keys per split search; its m smallest pick the subset
        keys = rng.random((2 * n, p))
    else:
        keys = np.empty((0, p))
    max_depth = -1 if params.max_depth is None else params.max_depth
    arrays = _grow(X, y, max_depth, params.min_leaf, params.min_split, keys, m, GAIN_RTOL)
    return TreeModel(*arrays, p, params)


def fit_tree(X, y, max_depth=12, min_leaf=5, min_split=10) -> TreeModel:
    """Fit a CART regression tree on all features."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ModelError(f"X rows ({X.shape}) and y length ({y.shape}) disagree")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ModelError("non-finite training data")
    return grow_tree(X, y, TreeParams(max_depth, min_leaf, min_split))
