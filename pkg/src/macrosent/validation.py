"""Input validation helpers used by the estimators and the backtest engine."""

import numpy as np


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array and require every entry to be finite."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={X.ndim}")
    if X.shape[0] == 0:
        raise ValueError(f"{name} has no rows")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def as_binary_target(y, name: str = "y") -> np.ndarray:
    """Coerce to a 1-D 0/1 integer array."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional")
    values = np.unique(y)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"{name} must contain only 0/1 labels, got {values!r}")
    return y.astype(np.int64)


def check_both_classes(y, name: str = "y") -> None:
    if np.unique(y).size < 2:
        raise ValueError(f"{name} contains a single class; cannot fit a classifier")


def check_consistent_length(*arrays) -> None:
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"inconsistent lengths: {sorted(lengths)}")


def check_feature_count(X: np.ndarray, expected: int) -> None:
    if X.shape[1] != expected:
        raise ValueError(
            f"feature count mismatch: model expects {expected}, got {X.shape[1]}"
        )
