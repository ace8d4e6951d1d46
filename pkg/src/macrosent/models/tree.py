"""Second-order regression trees: exact greedy splits on gradient/hessian sums."""

from dataclasses import dataclass, field

import numpy as np

HESSIAN_FLOOR = 1e-16


@dataclass
class TreeParams:
    max_depth: int = 3
    reg_lambda: float = 1.0
    reg_alpha: float = 0.0
    min_child_weight: float = 1.0
    gamma: float = 0.0


def _leaf_value(G: float, H: float, params: TreeParams) -> float:
    # alpha acts by soft-thresholding the gradient sum.
    if params.reg_alpha > 0.0:
        G = np.sign(G) * max(abs(G) - params.reg_alpha, 0.0)
    return -G / max(H + params.reg_lambda, HESSIAN_FLOOR)


def _split_score(G: float, H: float, lam: float) -> float:
    return G * G / max(H + lam, HESSIAN_FLOOR)


@dataclass
class RegressionTree:
    """Flat-array binary tree; children index -1 marks a leaf.

    `cover` is the hessian sum that reached each node at fit time; the SHAP
    recursion uses it as the conditioning weight, so it is stored for every node.
    """
    feature: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    threshold: np.ndarray = field(default_factory=lambda: np.zeros(0))
    left: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    right: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    value: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cover: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, node: int) -> bool:
        return self.left[node] < 0

    def max_node_depth(self) -> int:
        depth = {0: 0}
        deepest = 0
        for node in range(self.n_nodes):
            d = depth[node]
            if not self.is_leaf(node):
                depth[int(self.left[node])] = d + 1
                depth[int(self.right[node])] = d + 1
                deepest = max(deepest, d + 1)
        return deepest

    def predict(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            internal = self.left[idx] >= 0
            if not internal.any():
                break
            rows = np.nonzero(internal)[0]
            nodes = idx[rows]
            go_left = X[rows, self.feature[nodes]] < self.threshold[nodes]
            idx[rows] = np.where(go_left, self.left[nodes], self.right[nodes])
        return self.value[idx]

    def to_dict(self) -> dict:
        def node_dict(i: int) -> dict:
            if self.is_leaf(i):
                return {"value": float(self.value[i]), "cover": float(self.cover[i])}
            return {
                "feature": int(self.feature[i]),
                "threshold": float(self.threshold[i]),
                "cover": float(self.cover[i]),
                "left": node_dict(int(self.left[i])),
                "right": node_dict(int(self.right[i])),
            }
        return node_dict(0)

    @classmethod
    def from_dict(cls, root: dict) -> "RegressionTree":
        feature, threshold, left, right, value, cover = [], [], [], [], [], []

        def add(node: dict) -> int:
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            cover.append(node["cover"])
            if "value" in node:
                value[i] = node["value"]
            else:
                feature[i] = node["feature"]
                threshold[i] = node["threshold"]
                left[i] = add(node["left"])
                right[i] = add(node["right"])
            return i

        add(root)
        return cls(
            feature=np.array(feature, dtype=np.int64),
            threshold=np.array(threshold, dtype=np.float64),
            left=np.array(left, dtype=np.int64),
            right=np.array(right, dtype=np.int64),
            value=np.array(value, dtype=np.float64),
            cover=np.array(cover, dtype=np.float64),
        )


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray, params: TreeParams):
    """Exact greedy search over all features and midpoints of adjacent distinct values.

    Returns (gain, feature, threshold) for the best strictly positive gain, or None.
    Ties resolve to the lowest feature index, then the lowest threshold (features are
    scanned in ascending order with a strict comparison; within a feature the first
    argmax wins over ascending thresholds).
    """
    G, H = float(g.sum()), float(h.sum())
    parent_score = _split_score(G, H, params.reg_lambda)
    best = None
    for j in range(X.shape[1]):
        x = X[:, j]
        order = np.argsort(x, kind="stable")
        xs, gs, hs = x[order], g[order], h[order]
        boundaries = np.nonzero(xs[:-1] < xs[1:])[0]
        if boundaries.size == 0:
            continue
        GL = np.cumsum(gs)[boundaries]
        HL = np.cumsum(hs)[boundaries]
        GR, HR = G - GL, H - HL
        gains = 0.5 * (
            GL * GL / np.maximum(HL + params.reg_lambda, HESSIAN_FLOOR)
            + GR * GR / np.maximum(HR + params.reg_lambda, HESSIAN_FLOOR)
            - parent_score
        ) - params.gamma
        feasible = (HL >= params.min_child_weight) & (HR >= params.min_child_weight)
        gains = np.where(feasible, gains, -np.inf)
        pick = int(np.argmax(gains))
        gain = float(gains[pick])
        if gain <= 0.0:
            continue
        if best is None or gain > best[0]:
            i = boundaries[pick]
            best = (gain, j, float((xs[i] + xs[i + 1]) / 2.0))
    return best


def fit_regression_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray, params: TreeParams) -> RegressionTree:
    """Grow a tree on (gradient, hessian) targets; stops on depth, child weight, or gain."""
    feature, threshold, left, right, value, cover = [], [], [], [], [], []

    def grow(idx: np.ndarray, depth: int) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        gi, hi = g[idx], h[idx]
        cover.append(float(hi.sum()))
        split = None
        if depth < params.max_depth:
            split = _best_split(X[idx], gi, hi, params)
        if split is None:
            value[node] = _leaf_value(float(gi.sum()), float(hi.sum()), params)
            return node
        _, j, thr = split
        feature[node] = j
        threshold[node] = thr
        mask = X[idx, j] < thr
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return RegressionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        cover=np.array(cover, dtype=np.float64),
    )
