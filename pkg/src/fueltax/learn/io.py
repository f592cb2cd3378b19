"""Versioned JSON documents for fitted models.

The document carries a kind tag, hyperparameters, flattened parameters and
the fingerprint of the feature layout the model was trained on. Floats are
written with ``repr`` precision so a load/save cycle is lossless and
identical models serialise to identical bytes.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from fueltax.errors import LayoutMismatch, ModelError
from fueltax.learn.forest import ForestModel, ForestParams
from fueltax.learn.linear import LinearModel
from fueltax.learn.mlp import MlpModel
from fueltax.learn.tree import TreeModel, TreeParams

FORMAT = "fueltax.model"
VERSION = 1
MODEL_TYPES = (LinearModel, TreeModel, ForestModel, MlpModel)


def predict(model, X, spec=None) -> np.ndarray:
    """Apply any fitted model to ``X``.

    When ``spec`` is given and the model records a layout fingerprint, the
    two must agree.
    """
    if not isinstance(model, MODEL_TYPES):
        raise ModelError(f"not a fitted model: {type(model).__name__}")
    if spec is not None:
        check_layout(model, spec)
    out = model.predict(X)
    if not np.all(np.isfinite(out)):
        raise ModelError("model produced non-finite predictions")
    return out


def check_layout(model, spec) -> None:
    if model.fingerprint is not None and model.fingerprint != spec.fingerprint:
        raise LayoutMismatch(
            f"model was trained on feature layout {model.fingerprint}, got {spec.fingerprint}"
        )


def with_layout(model, spec):
    return dataclasses.replace(model, fingerprint=spec.fingerprint)


def hyperparameters(model) -> dict:
    if isinstance(model, LinearModel):
        return {"ridge_lambda": model.ridge_lambda}
    if isinstance(model, TreeModel):
        return dataclasses.asdict(model.params)
    if isinstance(model, ForestModel):
        return dataclasses.asdict(model.params)
    return dict(model.hyperparameters or {"hidden": list(model.layer_sizes[1:-1])})


def _tree_params(tree: TreeModel) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
        "count": tree.count.tolist(),
    }


def _tree_from(d: dict, n_features: int, params: TreeParams) -> TreeModel:
    return TreeModel(
        np.array(d["feature"], dtype=np.intp),
        np.array(d["threshold"], dtype=float),
        np.array(d["left"], dtype=np.intp),
        np.array(d["right"], dtype=np.intp),
        np.array(d["value"], dtype=float),
        np.array(d["count"], dtype=np.intp),
        n_features,
        params,
    )


def to_document(model, columns=None) -> dict:
    if isinstance(model, LinearModel):
        params = {"weights": model.weights.tolist(), "intercept": model.intercept}
    elif isinstance(model, TreeModel):
        params = {"n_features": model.n_features, **_tree_params(model)}
    elif isinstance(model, ForestModel):
        params = {
            "n_features": model.n_features,
            "master_seed": model.master_seed,
            "oob_r2": model.oob_r2,
            "trees": [_tree_params(t) for t in model.trees],
        }
    elif isinstance(model, MlpModel):
        params = {
            "layer_sizes": list(model.layer_sizes),
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
            "x_mean": model.x_mean.tolist(),
            "x_scale": model.x_scale.tolist(),
            "y_mean": model.y_mean,
            "y_scale": model.y_scale,
            "loss_history": list(model.loss_history),
        }
    else:
        raise ModelError(f"cannot serialise {type(model).__name__}")
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "hyperparameters": hyperparameters(model),
        "parameters": params,
        "layout": {"fingerprint": model.fingerprint, "columns": list(columns) if columns else None},
    }


def from_document(doc: dict):
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ModelError("not a model document")
    if doc.get("version") != VERSION:
        raise ModelError(f"unsupported model document version {doc.get('version')!r}")
    kind, hp, p = doc["kind"], doc["hyperparameters"], doc["parameters"]
    fingerprint = (doc.get("layout") or {}).get("fingerprint")
    if kind == "linear":
        model = LinearModel(np.array(p["weights"], dtype=float), float(p["intercept"]), float(hp["ridge_lambda"]))
    elif kind == "tree":
        model = _tree_from(p, p["n_features"], TreeParams(**hp))
    elif kind == "forest":
        fp = ForestParams(**hp)
        trees = tuple(_tree_from(t, p["n_features"], fp.tree_params()) for t in p["trees"])
        model = ForestModel(trees, fp, p["master_seed"], p["n_features"], p["oob_r2"])
    elif kind == "mlp":
        model = MlpModel(
            tuple(p["layer_sizes"]),
            tuple(np.array(w, dtype=float).reshape(a, b) for w, a, b in zip(p["weights"], p["layer_sizes"][:-1], p["layer_sizes"][1:])),
            tuple(np.array(b, dtype=float) for b in p["biases"]),
            np.array(p["x_mean"], dtype=float),
            np.array(p["x_scale"], dtype=float),
            float(p["y_mean"]),
            float(p["y_scale"]),
            tuple(p["loss_history"]),
            hp,
        )
    else:
        raise ModelError(f"unknown model kind {kind!r}")
    return dataclasses.replace(model, fingerprint=fingerprint)


def dumps(model, columns=None) -> str:
    return json.dumps(to_document(model, columns), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from None
    try:
        return from_document(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed model document: {exc!r}") from None
