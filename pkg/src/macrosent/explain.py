"""Per-prediction Shapley attributions for the boosted-trees model.

The fast path is the polynomial-time path-dependent recursion over each tree's
decision paths, weighting unexplored branches by the hessian covers recorded at
training time. `exact_shapley` is the independent test oracle: it enumerates all
feature subsets and applies the Shapley formula to the same cover-weighted
conditional expectation, so the two must agree to float precision.

Attributions are in margin (log-odds) space. The base value is the cover-weighted
expected margin of the ensemble, which makes the efficiency identity
``base_value + sum(attributions) == raw_margin(x)`` hold on every row.
"""

import csv
import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .models.boosting import BoostedTreesClassifier
from .models.logistic import LogisticClassifier
from .models.tree import RegressionTree

MAX_EXACT_FEATURES = 12
_COVER_FLOOR = 1e-300


@dataclass
class ShapMatrix:
    dates: list
    feature_names: tuple[str, ...]
    values: np.ndarray          # (n_rows, n_features), margin units
    base_value: float
    feature_values: np.ndarray  # raw inputs alongside, for summary coloring
    method: str


class _PathElement:
    __slots__ = ("feature", "zero_fraction", "one_fraction", "pweight")

    def __init__(self, feature: int, zero_fraction: float, one_fraction: float, pweight: float):
        self.feature = feature
        self.zero_fraction = zero_fraction
        self.one_fraction = one_fraction
        self.pweight = pweight

    def copy(self) -> "_PathElement":
        return _PathElement(self.feature, self.zero_fraction, self.one_fraction, self.pweight)


def _extend(path: list[_PathElement], zero_fraction: float, one_fraction: float, feature: int) -> None:
    depth = len(path)
    path.append(_PathElement(feature, zero_fraction, one_fraction, 1.0 if depth == 0 else 0.0))
    for i in range(depth - 1, -1, -1):
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / (depth + 1)
        path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / (depth + 1)


def _unwind(path: list[_PathElement], index: int) -> None:
    depth = len(path) - 1
    one_fraction = path[index].one_fraction
    zero_fraction = path[index].zero_fraction
    next_one = path[depth].pweight
    for i in range(depth - 1, -1, -1):
        if one_fraction != 0.0:
            tmp = path[i].pweight
            path[i].pweight = next_one * (depth + 1) / ((i + 1) * one_fraction)
            next_one = tmp - path[i].pweight * zero_fraction * (depth - i) / (depth + 1)
        else:
            path[i].pweight = path[i].pweight * (depth + 1) / (zero_fraction * (depth - i))
    for i in range(index, depth):
        path[i].feature = path[i + 1].feature
        path[i].zero_fraction = path[i + 1].zero_fraction
        path[i].one_fraction = path[i + 1].one_fraction
    path.pop()


def _unwound_sum(path: list[_PathElement], index: int) -> float:
    depth = len(path) - 1
    one_fraction = path[index].one_fraction
    zero_fraction = path[index].zero_fraction
    next_one = path[depth].pweight
    total = 0.0
    if one_fraction != 0.0:
        for i in range(depth - 1, -1, -1):
            tmp = next_one / ((i + 1) * one_fraction)
            total += tmp
            next_one = path[i].pweight - tmp * zero_fraction * (depth - i)
    else:
        for i in range(depth - 1, -1, -1):
            total += path[i].pweight / (zero_fraction * (depth - i))
    return total * (depth + 1)


def _shap_recurse(
    tree: RegressionTree,
    x: np.ndarray,
    phi: np.ndarray,
    node: int,
    path: list[_PathElement],
    parent_zero: float,
    parent_one: float,
    parent_feature: int,
) -> None:
    path = [e.copy() for e in path]
    _extend(path, parent_zero, parent_one, parent_feature)
    depth = len(path) - 1
    if tree.is_leaf(node):
        leaf_value = float(tree.value[node])
        for i in range(1, depth + 1):
            weight = _unwound_sum(path, i)
            el = path[i]
            phi[el.feature] += weight * (el.one_fraction - el.zero_fraction) * leaf_value
        return
    feature = int(tree.feature[node])
    lchild, rchild = int(tree.left[node]), int(tree.right[node])
    if x[feature] < tree.threshold[node]:
        hot, cold = lchild, rchild
    else:
        hot, cold = rchild, lchild
    incoming_zero = incoming_one = 1.0
    split_index = None
    for i in range(1, depth + 1):
        if path[i].feature == feature:
            split_index = i
            break
    if split_index is not None:
        incoming_zero = path[split_index].zero_fraction
        incoming_one = path[split_index].one_fraction
        _unwind(path, split_index)
    node_cover = max(float(tree.cover[node]), _COVER_FLOOR)
    _shap_recurse(tree, x, phi, hot, path,
                  incoming_zero * float(tree.cover[hot]) / node_cover, incoming_one, feature)
    _shap_recurse(tree, x, phi, cold, path,
                  incoming_zero * float(tree.cover[cold]) / node_cover, 0.0, feature)


def _tree_phi(tree: RegressionTree, x: np.ndarray, n_features: int) -> np.ndarray:
    phi = np.zeros(n_features)
    _shap_recurse(tree, x, phi, 0, [], 1.0, 1.0, -1)
    return phi


def _cover_expectation(tree: RegressionTree, node: int = 0) -> float:
    """Expected leaf value when every split is averaged by its children's covers."""
    if tree.is_leaf(node):
        return float(tree.value[node])
    node_cover = max(float(tree.cover[node]), _COVER_FLOOR)
    lchild, rchild = int(tree.left[node]), int(tree.right[node])
    return (
        float(tree.cover[lchild]) / node_cover * _cover_expectation(tree, lchild)
        + float(tree.cover[rchild]) / node_cover * _cover_expectation(tree, rchild)
    )


def expected_margin(model: BoostedTreesClassifier) -> float:
    """Cover-weighted expected raw margin of the ensemble (the SHAP base value)."""
    return model.base_score_ + model.learning_rate * sum(
        _cover_expectation(t) for t in model.trees_
    )


def tree_shap(
    model: BoostedTreesClassifier,
    X,
    feature_names: tuple[str, ...] | None = None,
    dates: list | None = None,
) -> ShapMatrix:
    """Exact per-row Shapley attributions via the path-dependent recursion."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.n_features_in_:
        raise ValueError(
            f"feature count mismatch: model expects {model.n_features_in_}, got {X.shape[1]}"
        )
    d = model.n_features_in_
    values = np.zeros((X.shape[0], d))
    for row in range(X.shape[0]):
        x = X[row]
        phi = np.zeros(d)
        for tree in model.trees_:
            phi += _tree_phi(tree, x, d)
        values[row] = model.learning_rate * phi
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(d))
    if dates is None:
        dates = list(range(X.shape[0]))
    return ShapMatrix(
        dates=dates,
        feature_names=tuple(feature_names),
        values=values,
        base_value=expected_margin(model),
        feature_values=X.copy(),
        method="tree_path_dependent",
    )


def _subset_expectation(tree: RegressionTree, x: np.ndarray, mask: int, node: int = 0) -> float:
    """Conditional expectation of the tree with features in `mask` fixed to x."""
    if tree.is_leaf(node):
        return float(tree.value[node])
    feature = int(tree.feature[node])
    lchild, rchild = int(tree.left[node]), int(tree.right[node])
    if (mask >> feature) & 1:
        child = lchild if x[feature] < tree.threshold[node] else rchild
        return _subset_expectation(tree, x, mask, child)
    node_cover = max(float(tree.cover[node]), _COVER_FLOOR)
    return (
        float(tree.cover[lchild]) / node_cover * _subset_expectation(tree, x, mask, lchild)
        + float(tree.cover[rchild]) / node_cover * _subset_expectation(tree, x, mask, rchild)
    )


def exact_shapley(model: BoostedTreesClassifier, x) -> np.ndarray:
    """Brute-force Shapley values over all 2^d feature subsets (test oracle only)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    d = model.n_features_in_
    if x.shape[0] != d:
        raise ValueError(f"feature count mismatch: model expects {d}, got {x.shape[0]}")
    if d > MAX_EXACT_FEATURES:
        raise ValueError(f"exact_shapley is limited to {MAX_EXACT_FEATURES} features, got {d}")
    fact = [math.factorial(i) for i in range(d + 1)]
    weight = [fact[s] * fact[d - s - 1] / fact[d] for s in range(d)]
    phi = np.zeros(d)
    for tree in model.trees_:
        v = [_subset_expectation(tree, x, mask) for mask in range(1 << d)]
        for i in range(d):
            bit = 1 << i
            acc = 0.0
            for mask in range(1 << d):
                if mask & bit:
                    continue
                acc += weight[mask.bit_count()] * (v[mask | bit] - v[mask])
            phi[i] += model.learning_rate * acc
    return phi


def shap_global_ranking(shap: ShapMatrix) -> list[tuple[str, float]]:
    """Features by descending mean |attribution|; ties break alphabetically."""
    if shap.values.size == 0:
        raise DataError("empty attribution matrix")
    mean_abs = np.abs(shap.values).mean(axis=0)
    pairs = list(zip(shap.feature_names, (float(v) for v in mean_abs)))
    pairs.sort(key=lambda kv: (-kv[1], kv[0]))
    return pairs


def linear_contributions(
    model: LogisticClassifier,
    X_scaled,
    feature_names: tuple[str, ...] | None = None,
    dates: list | None = None,
) -> ShapMatrix:
    """Per-feature margin contributions of the linear model on z-scored inputs.

    For a linear margin b + w.z the decomposition w_j * z_j is exact, so the
    efficiency identity holds by construction. Labeled distinctly from SHAP.
    """
    X_scaled = np.asarray(X_scaled, dtype=np.float64)
    if X_scaled.ndim == 1:
        X_scaled = X_scaled.reshape(1, -1)
    values = X_scaled * model.coef_[None, :]
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(X_scaled.shape[1]))
    if dates is None:
        dates = list(range(X_scaled.shape[0]))
    return ShapMatrix(
        dates=dates,
        feature_names=tuple(feature_names),
        values=values,
        base_value=model.intercept_,
        feature_values=X_scaled.copy(),
        method="linear_coefficient_zscore",
    )


def save_shap_csv(shap: ShapMatrix, path) -> None:
    """One row per (date, feature); a leading sidecar line carries the base value."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# base_value,{shap.base_value!r},method,{shap.method}\n")
        writer = csv.writer(fh)
        writer.writerow(["date", "feature", "shap_value", "feature_value"])
        for i, date in enumerate(shap.dates):
            stamp = date.isoformat() if isinstance(date, dt.date) else str(date)
            for j, name in enumerate(shap.feature_names):
                writer.writerow([
                    stamp, name,
                    repr(float(shap.values[i, j])),
                    repr(float(shap.feature_values[i, j])),
                ])


def save_ranking_csv(ranking: list[tuple[str, float]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "mean_abs_attribution"])
        for name, value in ranking:
            writer.writerow([name, repr(value)])
