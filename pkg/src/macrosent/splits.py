"""Expanding-window fold arithmetic shared by the backtest and hyperparameter tuning."""

from dataclasses import dataclass

from .errors import DataError


@dataclass(frozen=True)
class Fold:
    train: range
    test: range


def expanding_splits(n: int, k: int) -> list[Fold]:
    """Chronological expanding-window folds over n samples.

    Test size is floor(n / (k+1)); fold i (1-based) trains on [0, n - (k-i+1)*test)
    and tests on the next test-size block, so the first training range holds
    n - k*test samples and the k test blocks tile the tail of the sample.
    """
    if k < 1:
        raise DataError(f"need at least 1 split, got {k}")
    if n < 2 * (k + 1):
        raise DataError(f"n={n} too small for k={k} expanding splits (need n >= {2 * (k + 1)})")
    test_size = n // (k + 1)
    folds = []
    for i in range(1, k + 1):
        train_stop = n - (k - i + 1) * test_size
        folds.append(Fold(train=range(0, train_stop), test=range(train_stop, train_stop + test_size)))
    return folds


def clamped_internal_splits(n: int, k: int = 5) -> list[Fold]:
    """Expanding splits with k reduced until feasible for a small training slice."""
    while k > 1 and n < 2 * (k + 1):
        k -= 1
    return expanding_splits(n, k)
