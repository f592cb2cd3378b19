"""Feed-forward regression network trained by mini-batch gradient descent.

Hidden layers use tanh, the output is linear. Inputs and the target are
standardised with training-set statistics; predictions are mapped back to
the original target units. Loss is the mean squared error on the
standardised target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fueltax.errors import ModelError


@dataclass(frozen=True, eq=False)
class MlpModel:
    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]  # layer l: (layer_sizes[l], layer_sizes[l + 1])
    biases: tuple[np.ndarray, ...]
    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    y_scale: float
    loss_history: tuple[float, ...] = ()
    hyperparameters: dict | None = None
    fingerprint: str | None = None

    kind = "mlp"

    @property
    def n_features(self) -> int:
        return self.layer_sizes[0]

    def standardize(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.x_mean) / self.x_scale

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} columns, got shape {X.shape}")
        out = forward(self.weights, self.biases, self.standardize(X))[-1][:, 0]
        return out * self.y_scale + self.y_mean


def _scale(values):
    sd = values.std(axis=0)
    return np.where(sd > 0, sd, 1.0)


def init_params(layer_sizes, rng):
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def forward(weights, biases, Z):
    """Layer outputs, input first; hidden layers are tanh, the last is linear."""
    acts = [Z]
    last = len(weights) - 1
    for i, (W, b) in enumerate(zip(weights, biases)):
        a = acts[-1] @ W + b
        acts.append(a if i == last else np.tanh(a))
    return acts


def loss_and_gradients(weights, biases, Z, t):
    """Mean squared error of the network on ``(Z, t)`` and its gradients by backpropagation."""
    acts = forward(weights, biases, Z)
    n = Z.shape[0]
    resid = acts[-1][:, 0] - t
    loss = float(resid @ resid) / n
    delta = (2.0 / n) * resid[:, None]
    grad_w = [None] * len(weights)
    grad_b = [None] * len(weights)
    for i in range(len(weights) - 1, -1, -1):
        grad_w[i] = acts[i].T @ delta
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ weights[i].T) * (1.0 - acts[i] ** 2)
    return loss, grad_w, grad_b


def fit_mlp(
    X,
    y,
    hidden=(64,),
    epochs: int = 200,
    learning_rate: float = 1e-3,
    batch_size: int = 64,
    seed: int = 0,
) -> MlpModel:
    """Train a tanh network; ``hidden=()`` gives a linear model.

    Raises ModelError naming the epoch if the loss stops being finite.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],) or X.shape[0] < 1:
        raise ModelError(f"bad shapes X{X.shape} y{y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ModelError("non-finite training data")
    hidden = tuple(int(h) for h in hidden)
    if any(h < 1 for h in hidden) or epochs < 0 or batch_size < 1 or not learning_rate > 0:
        raise ModelError("invalid network hyperparameters")
    rng = np.random.default_rng(seed)
    x_mean, x_scale = X.mean(axis=0), _scale(X)
    y_mean, y_scale = float(y.mean()), float(_scale(y))
    Z = (X - x_mean) / x_scale
    t = (y - y_mean) / y_scale
    sizes = (X.shape[1],) + hidden + (1,)
    weights, biases = init_params(sizes, rng)
    n = X.shape[0]
    history = []
    # divergence is detected from the loss below, not from numpy warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, epochs + 1):
            order = rng.permutation(n)
            for lo in range(0, n, batch_size):
                batch = order[lo : lo + batch_size]
                _, gw, gb = loss_and_gradients(weights, biases, Z[batch], t[batch])
                for i in range(len(weights)):
                    weights[i] -= learning_rate * gw[i]
                    biases[i] -= learning_rate * gb[i]
            resid = forward(weights, biases, Z)[-1][:, 0] - t
            loss = float(resid @ resid) / n
            if not np.isfinite(loss):
                raise ModelError(f"training diverged at epoch {epoch}")
            history.append(loss)
    hp = {"hidden": list(hidden), "epochs": epochs, "learning_rate": learning_rate, "batch_size": batch_size}
    return MlpModel(sizes, tuple(weights), tuple(biases), x_mean, x_scale, y_mean, y_scale, tuple(history), hp)
