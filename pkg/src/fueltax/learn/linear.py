"""Least squares with optional ridge penalty, solved through the SVD."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fueltax.errors import ModelError


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    intercept: float
    ridge_lambda: float = 0.0
    fingerprint: str | None = None

    kind = "linear"

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} columns, got shape {X.shape}")
        return X @ self.weights + self.intercept


def fit_linear(X, y, lam: float = 0.0, intercept: bool = True) -> LinearModel:
    """Minimise ``|y - Xw - b|^2 + lam |w|^2``; the intercept is not penalised.

    With ``lam == 0`` and a rank-deficient design the minimum-norm
    least-squares solution is returned. Singular values below
    ``max(n, p) * eps * s_max`` are treated as zero in that case.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],) or X.shape[0] < 1 or X.shape[1] < 1:
        raise ModelError(f"bad shapes X{X.shape} y{y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ModelError("non-finite input to fit_linear")
    if not (np.isfinite(lam) and lam >= 0):
        raise ModelError(f"ridge lambda must be >= 0, got {lam!r}")
    if intercept:
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc, yc = X - x_mean, y - y_mean
    else:
        x_mean, y_mean = np.zeros(X.shape[1]), 0.0
        Xc, yc = X, y
    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    if lam == 0:
        cutoff = max(X.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            d = np.where(s > cutoff, 1.0 / s, 0.0)
    else:
        d = s / (s * s + lam)
    w = Vt.T @ (d * (U.T @ yc))
    b = y_mean - float(x_mean @ w) if intercept else 0.0
    if not np.all(np.isfinite(w)):
        raise ModelError("linear solve produced non-finite weights")
    return LinearModel(w, b, float(lam))
