"""Time-series-aware grid search for both classifiers.

Selection uses the same expanding-window arithmetic as the backtest, applied to the
training slice only, so no validation fold ever leaks into a fit. Grid iteration
order is deterministic and ties in mean validation log-loss keep the earliest point.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from ..splits import Fold, clamped_internal_splits
from ..validation import as_binary_target, as_float_matrix, check_both_classes
from .boosting import BoostedTreesClassifier, logloss
from .logistic import LogisticClassifier

DEFAULT_C_GRID = (0.01, 0.1, 1.0, 10.0)
DEFAULT_INTERNAL_SPLITS = 5


@dataclass
class GbtGrid:
    max_depth: tuple = (2, 3, 4)
    learning_rate: tuple = (0.05, 0.1)
    reg_lambda: tuple = (1.0,)
    reg_alpha: tuple = (0.0,)
    min_child_weight: tuple = (1.0,)
    n_rounds: int = 500
    early_stop_rounds: int = 50

    def points(self):
        for depth, lr, lam, alpha, mcw in itertools.product(
            self.max_depth, self.learning_rate, self.reg_lambda,
            self.reg_alpha, self.min_child_weight,
        ):
            yield {
                "max_depth": depth,
                "learning_rate": lr,
                "reg_lambda": lam,
                "reg_alpha": alpha,
                "min_child_weight": mcw,
            }


def train_logistic(X, y, c_grid=DEFAULT_C_GRID, cv: list[Fold] | None = None) -> LogisticClassifier:
    """Pick C by mean validation log-loss over expanding folds, then refit on all data."""
    X = as_float_matrix(X)
    y = as_binary_target(y)
    check_both_classes(y)
    c_grid = list(c_grid)
    if not c_grid:
        raise ValueError("empty C grid")
    if len(c_grid) == 1:
        best_c = c_grid[0]
    else:
        if cv is None:
            cv = clamped_internal_splits(len(y), DEFAULT_INTERNAL_SPLITS)
        best_c, best_score = None, np.inf
        for C in c_grid:
            losses = []
            for fold in cv:
                model = LogisticClassifier(C=C).fit(X[fold.train], y[fold.train])
                p = model.predict_proba(X[fold.test])[:, 1]
                losses.append(logloss(y[fold.test], p))
            score = float(np.mean(losses))
            if score < best_score:
                best_c, best_score = C, score
    final = LogisticClassifier(C=best_c).fit(X, y)
    final.chosen_C_ = best_c
    return final


def train_gbt(
    X, y,
    grid: GbtGrid | None = None,
    cv: list[Fold] | None = None,
    early_stop_rounds: int | None = None,
) -> BoostedTreesClassifier:
    """Grid search with per-fold early stopping; the refit round count comes from the
    last internal fold's stopping point and the grid point with the best mean
    validation log-loss wins."""
    X = as_float_matrix(X)
    y = as_binary_target(y)
    check_both_classes(y)
    if grid is None:
        grid = GbtGrid()
    if early_stop_rounds is None:
        early_stop_rounds = grid.early_stop_rounds
    points = list(grid.points())
    if not points:
        raise ValueError("empty hyperparameter grid")
    if cv is None:
        cv = clamped_internal_splits(len(y), DEFAULT_INTERNAL_SPLITS)

    best_point, best_rounds, best_score = None, None, np.inf
    for point in points:
        losses = []
        rounds_for_point = 1
        for fold in cv:
            model = BoostedTreesClassifier(n_rounds=grid.n_rounds, **point)
            model.fit(
                X[fold.train], y[fold.train],
                eval_set=(X[fold.test], y[fold.test]),
                early_stopping_rounds=early_stop_rounds,
            )
            losses.append(model.best_eval_loss_)
            rounds_for_point = max(model.best_round_, 1)  # last fold's stop wins
        score = float(np.mean(losses))
        if score < best_score:
            best_point, best_rounds, best_score = point, rounds_for_point, score

    final = BoostedTreesClassifier(n_rounds=best_rounds, **best_point)
    final.fit(X, y)
    final.chosen_params_ = dict(best_point, n_rounds=best_rounds)
    return final
