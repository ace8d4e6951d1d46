"""Exception types shared across the pipeline."""


class DataError(ValueError):
    """A data file or record violates its contract (maps to CLI exit code 2)."""


class BacktestError(RuntimeError):
    """A fold of the walk-forward evaluation failed; the message names the fold."""
