"""Versioned JSON round-trip for trained models; predictions survive bit-exactly."""

import json
from pathlib import Path

import numpy as np

from ..errors import DataError
from .boosting import BoostedTreesClassifier
from .logistic import LogisticClassifier
from .tree import RegressionTree

SCHEMA_VERSION = 1


def model_to_dict(model) -> dict:
    if isinstance(model, LogisticClassifier):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "logistic",
            "C": model.C,
            "weights": [float(w) for w in model.coef_],
            "intercept": model.intercept_,
        }
    if isinstance(model, BoostedTreesClassifier):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "boosted_trees",
            "learning_rate": model.learning_rate,
            "base_score": model.base_score_,
            "n_features": model.n_features_in_,
            "params": {
                "max_depth": model.max_depth,
                "reg_lambda": model.reg_lambda,
                "reg_alpha": model.reg_alpha,
                "min_child_weight": model.min_child_weight,
                "gamma": model.gamma,
            },
            "trees": [t.to_dict() for t in model.trees_],
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(doc: dict):
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataError(f"unsupported model schema_version {version!r}")
    kind = doc.get("kind")
    if kind == "logistic":
        model = LogisticClassifier(C=doc["C"])
        model.coef_ = np.array(doc["weights"], dtype=np.float64)
        model.intercept_ = float(doc["intercept"])
        model.n_features_in_ = len(model.coef_)
        return model
    if kind == "boosted_trees":
        params = doc["params"]
        model = BoostedTreesClassifier(
            n_rounds=len(doc["trees"]),
            learning_rate=doc["learning_rate"],
            **params,
        )
        model.base_score_ = float(doc["base_score"])
        model.trees_ = [RegressionTree.from_dict(t) for t in doc["trees"]]
        model.best_round_ = len(model.trees_)
        model.n_features_in_ = int(doc["n_features"])
        return model
    raise DataError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    return model_from_dict(json.loads(path.read_text(encoding="utf-8")))
