"""Slow, independent reference implementations used to check the package.

Nothing here imports the code under test except where a function's inputs
must be built (the MLP parameter lists).
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def solve_exact(A, b):
    """Solve ``A x = b`` over the rationals by Gauss-Jordan elimination."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        M[col], M[pivot] = M[pivot], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def ridge_exact(X, y, lam, intercept=True):
    """Weights and intercept from the normal equations, solved exactly.

    With an intercept the system gains a column of ones whose coefficient is
    not penalised. Floats are converted to fractions without rounding.
    """
    X = [[Fraction(float(v)) for v in row] for row in np.asarray(X)]
    y = [Fraction(float(v)) for v in np.asarray(y)]
    lam = Fraction(float(lam))
    p = len(X[0])
    cols = [row + [Fraction(1)] for row in X] if intercept else X
    q = len(cols[0])
    A = [[sum(r[i] * r[j] for r in cols) for j in range(q)] for i in range(q)]
    for i in range(p):
        A[i][i] += lam
    rhs = [sum(r[i] * yi for r, yi in zip(cols, y)) for i in range(q)]
    sol = solve_exact(A, rhs)
    return sol[:p], (sol[p] if intercept else Fraction(0))


def _sse(values):
    s = sum(values, Fraction(0))
    return sum((v * v for v in values), Fraction(0)) - s * s / len(values)


def _mean_sequential(y, rows):
    # same summation order as the tree's leaves: ascending row index
    total = 0.0
    for i in sorted(rows):
        total += y[i]
    return total / len(rows)


def exhaustive_tree(X, y, max_depth=None, min_leaf=1, min_split=2):
    """Build a regression tree by trying every (feature, midpoint) split.

    Gains are exact rationals. The first maximum in (feature, threshold)
    order wins, which is the lowest-feature-then-lowest-threshold rule.
    Returns nested tuples: ``("leaf", value)`` or
    ``("split", feature, threshold, left, right)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    exact = [Fraction(float(v)) for v in y]

    def build(rows, depth):
        leaf = ("leaf", _mean_sequential(y, rows))
        if len(rows) < min_split or len(rows) < 2 * min_leaf:
            return leaf
        if max_depth is not None and depth >= max_depth:
            return leaf
        parent = _sse([exact[i] for i in rows])
        best = None
        for f in range(X.shape[1]):
            values = sorted({X[i, f] for i in rows})
            for lo, hi in zip(values, values[1:]):
                t = 0.5 * (lo + hi)
                if not lo < t < hi:
                    t = lo
                left = [i for i in rows if X[i, f] <= t]
                right = [i for i in rows if X[i, f] > t]
                if len(left) < min_leaf or len(right) < min_leaf:
                    continue
                gain = parent - _sse([exact[i] for i in left]) - _sse([exact[i] for i in right])
                if best is None or gain > best[0]:
                    best = (gain, f, t, left, right)
        if best is None or best[0] <= 0:
            return leaf
        _, f, t, left, right = best
        return ("split", f, t, build(left, depth + 1), build(right, depth + 1))

    return build(list(range(len(y))), 0)


def tree_predict(node, x):
    while node[0] == "split":
        _, f, t, left, right = node
        node = left if x[f] <= t else right
    return node[1]


def central_differences(loss_fn, params, step=1e-5):
    """Numerical gradient of ``loss_fn()`` w.r.t. every entry of the arrays in ``params``.

    The arrays are perturbed in place and restored.
    """
    grads = []
    for P in params:
        G = np.zeros_like(P)
        for idx in np.ndindex(P.shape):
            old = P[idx]
            P[idx] = old + step
            up = loss_fn()
            P[idx] = old - step
            down = loss_fn()
            P[idx] = old
            G[idx] = (up - down) / (2 * step)
        grads.append(G)
    return grads


def max_relative_error(analytic, numeric, floor=1e-6):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
