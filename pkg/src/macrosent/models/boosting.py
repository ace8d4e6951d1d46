"""Gradient-boosted trees minimizing binary logistic loss."""

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import as_binary_target, as_float_matrix, check_both_classes, check_feature_count
from .logistic import sigmoid
from .tree import RegressionTree, TreeParams, fit_regression_tree

PROB_CLIP = 1e-12


def logloss(y, p) -> float:
    """Mean binary cross-entropy with probabilities clipped to [1e-12, 1 - 1e-12]."""
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape:
        raise ValueError(f"length mismatch: y has {y.shape}, p has {p.shape}")
    p = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


class BoostedTreesClassifier(BaseEstimator, ClassifierMixin):
    """Boosted second-order regression trees on the logistic loss.

    The base score is the log-odds of the training prevalence, so a zero-tree model
    predicts the class rate. Trees store raw leaf values; the learning rate scales
    them at accumulation time. Training is fully deterministic: no subsampling, and
    split ties break to the lowest feature index then the lowest threshold.
    """

    def __init__(
        self,
        n_rounds: int = 500,
        learning_rate: float = 0.1,
        max_depth: int = 3,
        reg_lambda: float = 1.0,
        reg_alpha: float = 0.0,
        min_child_weight: float = 1.0,
        gamma: float = 0.0,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.reg_alpha = reg_alpha
        self.min_child_weight = min_child_weight
        self.gamma = gamma

    def fit(self, X, y, eval_set=None, early_stopping_rounds=None):
        """Boost up to n_rounds; with an eval_set and early_stopping_rounds, stop
        after that many rounds without validation log-loss improvement and keep the
        best round count."""
        X = as_float_matrix(X)
        y = as_binary_target(y)
        check_both_classes(y)
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        params = TreeParams(
            max_depth=self.max_depth,
            reg_lambda=self.reg_lambda,
            reg_alpha=self.reg_alpha,
            min_child_weight=self.min_child_weight,
            gamma=self.gamma,
        )
        prevalence = min(max(float(y.mean()), PROB_CLIP), 1.0 - PROB_CLIP)
        self.base_score_ = math.log(prevalence / (1.0 - prevalence))
        yf = y.astype(np.float64)

        margins = np.full(X.shape[0], self.base_score_)
        if eval_set is not None:
            X_val = as_float_matrix(eval_set[0])
            y_val = as_binary_target(eval_set[1]).astype(np.float64)
            val_margins = np.full(X_val.shape[0], self.base_score_)
            best_loss = logloss(y_val, sigmoid(val_margins))
            best_round = 0
            eval_losses = [best_loss]
        trees: list[RegressionTree] = []
        train_losses = [logloss(yf, sigmoid(margins))]

        for round_no in range(1, self.n_rounds + 1):
            p = sigmoid(margins)
            g = p - yf
            h = p * (1.0 - p)
            tree = fit_regression_tree(X, g, h, params)
            trees.append(tree)
            margins = margins + self.learning_rate * tree.predict(X)
            train_losses.append(logloss(yf, sigmoid(margins)))
            if eval_set is not None:
                val_margins = val_margins + self.learning_rate * tree.predict(X_val)
                loss = logloss(y_val, sigmoid(val_margins))
                eval_losses.append(loss)
                if loss < best_loss:
                    best_loss, best_round = loss, round_no
                elif early_stopping_rounds and round_no - best_round >= early_stopping_rounds:
                    break

        if eval_set is not None:
            self.trees_ = trees[:best_round]
            self.best_round_ = best_round
            self.best_eval_loss_ = best_loss
            self.eval_losses_ = eval_losses
            self.train_losses_ = train_losses[: best_round + 1]
        else:
            self.trees_ = trees
            self.best_round_ = len(trees)
            self.train_losses_ = train_losses
        self.n_features_in_ = X.shape[1]
        return self

    def raw_margin(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        check_feature_count(X, self.n_features_in_)
        margins = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            margins += self.learning_rate * tree.predict(X)
        return margins

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.raw_margin(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] > 0.5).astype(np.int64)
