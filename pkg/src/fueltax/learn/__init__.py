"""From-scratch regressors: least squares, CART, random forest and an MLP."""

from fueltax.learn.evaluate import FitReport, LearnConfig, fit_all, fit_model
from fueltax.learn.forest import ForestModel, ForestParams, fit_forest
from fueltax.learn.io import check_layout, dumps, loads, predict, with_layout
from fueltax.learn.linear import LinearModel, fit_linear
from fueltax.learn.metrics import r2
from fueltax.learn.mlp import MlpModel, fit_mlp
from fueltax.learn.tree import TreeModel, TreeParams, fit_tree

__all__ = [
    "FitReport",
    "ForestModel",
    "ForestParams",
    "LearnConfig",
    "LinearModel",
    "MlpModel",
    "TreeModel",
    "TreeParams",
    "check_layout",
    "dumps",
    "fit_all",
    "fit_forest",
    "fit_linear",
    "fit_mlp",
    "fit_model",
    "fit_tree",
    "loads",
    "predict",
    "r2",
    "with_layout",
]
