"""Train the four learners on a split and compare held-out R^2."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from fueltax.errors import ModelError, ParseError
from fueltax.learn.forest import ForestParams, fit_forest
from fueltax.learn.io import hyperparameters, predict, with_layout
from fueltax.learn.linear import fit_linear
from fueltax.learn.metrics import r2
from fueltax.learn.mlp import fit_mlp
from fueltax.learn.tree import TreeParams, fit_tree

LEARNERS = ("linear", "tree", "forest", "mlp")
FIT_HEADER = ("kind", "seed", "r2_train", "r2_test", "hyperparameters")


@dataclass(frozen=True)
class LearnConfig:
    seed: int = 0
    linear_lambda: float = 1e-6
    tree: TreeParams = field(default_factory=TreeParams)
    forest: ForestParams = field(default_factory=ForestParams)
    mlp_hidden: tuple[int, ...] = (64,)
    mlp_epochs: int = 200
    mlp_learning_rate: float = 1e-3
    mlp_batch_size: int = 64
    workers: int = 1


@dataclass(frozen=True)
class FitReport:
    kind: str
    hyperparameters: dict
    seed: int
    r2_train: float
    r2_test: float
    wall_time: float = 0.0
    model: object = field(default=None, compare=False, repr=False)


def fit_model(kind: str, X, y, config: LearnConfig | None = None):
    config = config or LearnConfig()
    if kind == "linear":
        return fit_linear(X, y, config.linear_lambda)
    if kind == "tree":
        t = config.tree
        return fit_tree(X, y, t.max_depth, t.min_leaf, t.min_split)
    if kind == "forest":
        return fit_forest(X, y, config.forest, config.seed, config.workers)
    if kind == "mlp":
        return fit_mlp(
            X, y, config.mlp_hidden, config.mlp_epochs, config.mlp_learning_rate, config.mlp_batch_size, config.seed
        )
    raise ModelError(f"unknown learner {kind!r}; expected one of {LEARNERS}")


def evaluate_model(kind, design, split_index, config: LearnConfig | None = None) -> FitReport:
    config = config or LearnConfig()
    train, test = split_index.train_rows, split_index.test_rows
    X, y = design.X, design.y
    started = time.perf_counter()
    model = with_layout(fit_model(kind, X[train], y[train], config), design.spec)
    elapsed = time.perf_counter() - started
    return FitReport(
        kind,
        hyperparameters(model),
        config.seed,
        r2(y[train], predict(model, X[train])),
        r2(y[test], predict(model, X[test])),
        elapsed,
        model,
    )


def fit_all(design, split_index, config: LearnConfig | None = None, kinds=LEARNERS) -> list[FitReport]:
    """Fit every learner on the training rows; reports sorted by held-out R^2, best first."""
    reports = [evaluate_model(kind, design, split_index, config) for kind in kinds]
    return sorted(reports, key=lambda r: -r.r2_test)


def _format_hp(hp: dict) -> str:
    def fmt(v):
        if isinstance(v, (list, tuple)):
            return "x".join(str(x) for x in v)
        return "none" if v is None else str(v)

    return ";".join(f"{k}={fmt(v)}" for k, v in sorted(hp.items()))


def reports_to_csv(reports) -> str:
    """Fit reports as CSV. Wall time is left out so reruns are byte-identical."""
    lines = [",".join(FIT_HEADER)]
    for r in reports:
        lines.append(f"{r.kind},{r.seed},{r.r2_train!r},{r.r2_test!r},{_format_hp(r.hyperparameters)}")
    return "\n".join(lines) + "\n"


def parse_fit_csv(text: str) -> list[dict]:
    rows = text.strip("\n").split("\n")
    if not rows or rows[0] != ",".join(FIT_HEADER):
        raise ParseError("bad fit report header", line=1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        parts = row.split(",")
        if len(parts) != len(FIT_HEADER):
            raise ParseError("wrong field count", line=lineno)
        kind, seed, r2_train, r2_test, hp = parts
        params = dict(item.split("=", 1) for item in hp.split(";") if item)
        out.append(
            {"kind": kind, "seed": int(seed), "r2_train": float(r2_train), "r2_test": float(r2_test), "hyperparameters": params}
        )
    return out


def comparison_table(reports) -> str:
    """Plain-text model comparison, best held-out R^2 first."""
    names = {"linear": "Linear Regression", "tree": "Decision Tree Regression",
             "forest": "Random Forest Regression", "mlp": "Neural Network Regression"}
    width = max(len(v) for v in names.values())
    lines = [f"{'Model':<{width}}  {'R2 train':>9}  {'R2 test':>9}", "-" * (width + 22)]
    for r in reports:
        lines.append(f"{names.get(r.kind, r.kind):<{width}}  {r.r2_train:9.4f}  {r.r2_test:9.4f}")
    return "\n".join(lines)
