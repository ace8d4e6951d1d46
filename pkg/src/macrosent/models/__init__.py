from .boosting import BoostedTreesClassifier, logloss
from .logistic import LogisticClassifier, logistic_objective, sigmoid
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tree import RegressionTree, TreeParams, fit_regression_tree
from .tuning import DEFAULT_C_GRID, GbtGrid, train_gbt, train_logistic

__all__ = [
    "BoostedTreesClassifier",
    "DEFAULT_C_GRID",
    "GbtGrid",
    "LogisticClassifier",
    "RegressionTree",
    "TreeParams",
    "fit_regression_tree",
    "load_model",
    "logistic_objective",
    "logloss",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "sigmoid",
    "train_gbt",
    "train_logistic",
]
