"""L2-regularized logistic regression fit with a damped Newton solver."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import as_binary_target, as_float_matrix, check_both_classes, check_feature_count

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_objective(wb: np.ndarray, X: np.ndarray, y: np.ndarray, C: float):
    """Mean log-loss plus (1/(2C))*||w||^2 with an unpenalized intercept.

    `wb` stacks the weight vector and the intercept as its last entry. Returns
    (loss, gradient); the gradient matches the same parameter stacking.
    """
    n = X.shape[0]
    w, b = wb[:-1], wb[-1]
    z = X @ w + b
    signed = np.where(y == 1, z, -z)
    loss = float(np.mean(np.logaddexp(0.0, -signed))) + (w @ w) / (2.0 * C)
    p = sigmoid(z)
    resid = (p - y) / n
    grad = np.empty_like(wb)
    grad[:-1] = X.T @ resid + w / C
    grad[-1] = resid.sum()
    return loss, grad


class LogisticClassifier(BaseEstimator, ClassifierMixin):
    """Binary logistic regression minimizing mean log-loss + ||w||^2 / (2C).

    The solver is damped Newton with Armijo backtracking; it stops when the
    gradient norm falls below `tol` or after `max_iter` iterations.
    """

    def __init__(self, C: float = 1.0, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = as_float_matrix(X)
        y = as_binary_target(y)
        check_both_classes(y)
        if self.C <= 0:
            raise ValueError(f"C must be positive, got {self.C}")
        n, d = X.shape
        wb = np.zeros(d + 1)
        loss, grad = logistic_objective(wb, X, y, self.C)
        gnorm = float(np.linalg.norm(grad))
        it = 0
        while gnorm > self.tol and it < self.max_iter:
            z = X @ wb[:-1] + wb[-1]
            p = sigmoid(z)
            h = p * (1.0 - p)
            # Hessian of the objective in the stacked (w, b) parameterization.
            hess = np.empty((d + 1, d + 1))
            Xh = X * h[:, None]
            hess[:d, :d] = (X.T @ Xh) / n + np.eye(d) / self.C
            hess[:d, d] = Xh.sum(axis=0) / n
            hess[d, :d] = hess[:d, d]
            hess[d, d] = h.sum() / n
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                step = np.linalg.solve(hess + 1e-10 * np.eye(d + 1), -grad)
            # Armijo backtracking on the full objective.
            slope = float(grad @ step)
            alpha = 1.0
            for _ in range(50):
                cand = wb + alpha * step
                cand_loss, cand_grad = logistic_objective(cand, X, y, self.C)
                if cand_loss <= loss + 1e-4 * alpha * slope:
                    break
                alpha *= 0.5
            wb, loss, grad = cand, cand_loss, cand_grad
            gnorm = float(np.linalg.norm(grad))
            it += 1
        self.coef_ = wb[:-1].copy()
        self.intercept_ = float(wb[-1])
        self.n_iter_ = it
        self.grad_norm_ = gnorm
        self.converged_ = gnorm <= self.tol
        self.n_features_in_ = d
        return self

    def decision_function(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        check_feature_count(X, self.n_features_in_)
        return X @ self.coef_ + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] > 0.5).astype(np.int64)
