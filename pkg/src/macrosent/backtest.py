"""Cost-aware expanding-window backtest with block-bootstrap confidence intervals.

Protocol per fold: scale (logistic only) and tune on the training slice alone, fit,
score the untouched test block, map probabilities through the 0.5 threshold to +/-1
positions, and charge the flat round-trip rate once per position change (entering on
a fold's first day counts). Fold test blocks tile the tail of the sample, so their
concatenation is the out-of-sample record the aggregate metrics and bootstrap
intervals are computed on.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BacktestError, DataError
from .features import FeatureMatrix, ZScoreScaler
from .models.tuning import DEFAULT_C_GRID, GbtGrid, train_gbt, train_logistic
from .splits import Fold, clamped_internal_splits, expanding_splits  # noqa: F401

TRADING_DAYS_PER_YEAR = 252


@dataclass(frozen=True)
class DailyStrategyRecord:
    date: object
    proba: float
    position: int
    market_return: float
    trade: bool
    net_return: float


@dataclass
class PerfMetrics:
    cagr: float
    sharpe: float | None          # None marks an undefined (zero-variance) ratio
    ann_vol: float
    max_drawdown: float
    win_pct: float
    total_return: float
    n_trades: int
    cum_cost: float


@dataclass
class BootstrapInterval:
    statistic: str
    lower: float
    upper: float
    n_boot: int
    block: int
    seed: int


@dataclass
class FoldResult:
    fold: int
    records: list[DailyStrategyRecord]
    metrics: PerfMetrics
    accuracy: float
    auc: float | None
    chosen_params: dict


@dataclass
class BacktestReport:
    folds: list[FoldResult]
    records: list[DailyStrategyRecord]
    metrics: PerfMetrics
    accuracy: float
    auc: float | None
    intervals: dict[str, BootstrapInterval]


@dataclass
class ModelSpec:
    kind: str = "gbt"  # "gbt" | "logistic"
    c_grid: tuple = DEFAULT_C_GRID
    gbt_grid: GbtGrid = field(default_factory=GbtGrid)
    internal_splits: int = 5


def positions_from_proba(p: float) -> int:
    """Long above 0.5, short at or below it (never flat)."""
    return 1 if p > 0.5 else -1


def net_strategy_returns(
    positions,
    returns,
    cost_rate: float,
    dates=None,
    probas=None,
) -> list[DailyStrategyRecord]:
    """Position * market return, minus the flat rate on every position change.

    The first day always counts as a trade (the initial entry).
    """
    if len(positions) != len(returns):
        raise DataError(
            f"positions ({len(positions)}) and returns ({len(returns)}) are misaligned"
        )
    if cost_rate < 0:
        raise DataError(f"cost_rate must be >= 0, got {cost_rate}")
    if dates is None:
        dates = list(range(len(positions)))
    if probas is None:
        probas = [float("nan")] * len(positions)
    records = []
    prev = None
    for date, proba, pos, ret in zip(dates, probas, positions, returns):
        pos = int(pos)
        if pos not in (-1, 1):
            raise DataError(f"position must be +1 or -1, got {pos}")
        trade = prev is None or pos != prev
        ret = float(ret)
        net = pos * ret - (cost_rate if trade else 0.0)
        records.append(DailyStrategyRecord(date, float(proba), pos, ret, trade, net))
        prev = pos
    return records


def perf_metrics(
    records: list[DailyStrategyRecord],
    cost_rate: float,
    periods_per_year: int = TRADING_DAYS_PER_YEAR,
) -> PerfMetrics:
    """Equity-curve metrics over daily net log returns."""
    if len(records) < 2:
        raise DataError(f"need at least 2 records, got {len(records)}")
    nets = np.array([r.net_return for r in records])
    n = len(nets)
    equity = np.exp(np.cumsum(nets))
    total_return = float(equity[-1] - 1.0)
    cagr = float(equity[-1] ** (periods_per_year / n) - 1.0)
    std = float(nets.std(ddof=1))
    sharpe = float(nets.mean() / std * math.sqrt(periods_per_year)) if std > 0 else None
    ann_vol = std * math.sqrt(periods_per_year)
    running_max = np.maximum.accumulate(equity)
    max_drawdown = float((equity / running_max - 1.0).min())
    win_pct = float(100.0 * (nets > 0).mean())
    n_trades = sum(1 for r in records if r.trade)
    return PerfMetrics(
        cagr=cagr,
        sharpe=sharpe,
        ann_vol=ann_vol,
        max_drawdown=max_drawdown,
        win_pct=win_pct,
        total_return=total_return,
        n_trades=n_trades,
        cum_cost=n_trades * cost_rate,
    )


def _sharpe_stat(nets: np.ndarray, periods_per_year: int) -> float:
    std = nets.std(ddof=1)
    if std == 0:
        return float("nan")
    return float(nets.mean() / std * math.sqrt(periods_per_year))


def _cagr_stat(nets: np.ndarray, periods_per_year: int) -> float:
    return float(math.exp(nets.sum()) ** (periods_per_year / len(nets)) - 1.0)


_STATISTICS = {"sharpe": _sharpe_stat, "cagr": _cagr_stat}


def block_bootstrap_ci(
    series,
    statistic: str = "sharpe",
    n_boot: int = 1000,
    block: int = 20,
    level: float = 0.95,
    rng_seed: int = 0,
    periods_per_year: int = TRADING_DAYS_PER_YEAR,
) -> BootstrapInterval:
    """Moving-block bootstrap percentile interval over daily net returns.

    Overlapping blocks of fixed length start uniformly inside the series; each
    replicate concatenates ceil(n / block) of them and truncates to n.
    """
    series = np.asarray(series, dtype=np.float64)
    n = len(series)
    if n < block:
        raise DataError(f"series length {n} is shorter than block size {block}")
    if statistic not in _STATISTICS:
        raise DataError(f"unknown statistic {statistic!r}; expected one of {sorted(_STATISTICS)}")
    stat_fn = _STATISTICS[statistic]
    n_blocks = math.ceil(n / block)
    rng = np.random.default_rng(rng_seed)
    stats = np.empty(n_boot)
    max_start = n - block
    for b in range(n_boot):
        starts = rng.integers(0, max_start + 1, size=n_blocks)
        sample = np.concatenate([series[s: s + block] for s in starts])[:n]
        stats[b] = stat_fn(sample, periods_per_year)
    alpha = (1.0 - level) / 2.0
    lower, upper = np.quantile(stats, [alpha, 1.0 - alpha])
    return BootstrapInterval(
        statistic=statistic,
        lower=float(lower),
        upper=float(upper),
        n_boot=n_boot,
        block=block,
        seed=rng_seed,
    )


def _rank_auc(y: np.ndarray, p: np.ndarray) -> float | None:
    """Mann-Whitney AUC with midranks for ties; None when only one class is present."""
    pos = p[y == 1]
    neg = p[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        return None
    order = np.argsort(np.concatenate([pos, neg]), kind="stable")
    ranks = np.empty(len(order))
    sorted_vals = np.concatenate([pos, neg])[order]
    i = 0
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i: j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum_pos = ranks[: len(pos)].sum()
    u = rank_sum_pos - len(pos) * (len(pos) + 1) / 2.0
    return float(u / (len(pos) * len(neg)))


def _fit_for_fold(spec: ModelSpec, X_train: np.ndarray, y_train: np.ndarray):
    cv = clamped_internal_splits(len(y_train), spec.internal_splits)
    if spec.kind == "logistic":
        scaler = ZScoreScaler().fit(X_train)
        model = train_logistic(scaler.transform(X_train), y_train, c_grid=spec.c_grid, cv=cv)
        return model, scaler
    if spec.kind == "gbt":
        model = train_gbt(X_train, y_train, grid=spec.gbt_grid, cv=cv)
        return model, None
    raise DataError(f"unknown model kind {spec.kind!r}")


def run_backtest(
    matrix: FeatureMatrix,
    spec: ModelSpec,
    cost_rate: float,
    k: int = 5,
    n_boot: int = 1000,
    block: int = 20,
    level: float = 0.95,
    seed: int = 0,
) -> BacktestReport:
    """Walk the expanding folds, retraining and scoring each test block in turn."""
    n = len(matrix)
    plan = expanding_splits(n, k)
    folds: list[FoldResult] = []
    all_records: list[DailyStrategyRecord] = []
    probs_all, labels_all = [], []
    for fold_no, fold in enumerate(plan, start=1):
        try:
            X_train, y_train = matrix.X[fold.train], matrix.y[fold.train]
            X_test, y_test = matrix.X[fold.test], matrix.y[fold.test]
            model, scaler = _fit_for_fold(spec, X_train, y_train)
            X_scored = scaler.transform(X_test) if scaler is not None else X_test
            p = model.predict_proba(X_scored)[:, 1]
            positions = [positions_from_proba(v) for v in p]
            records = net_strategy_returns(
                positions,
                matrix.next_returns[fold.test],
                cost_rate,
                dates=[matrix.dates[i] for i in fold.test],
                probas=p,
            )
        except (DataError, ValueError) as exc:
            raise BacktestError(f"fold {fold_no} failed: {exc}") from exc
        accuracy = float(((p > 0.5).astype(int) == y_test).mean())
        folds.append(FoldResult(
            fold=fold_no,
            records=records,
            metrics=perf_metrics(records, cost_rate),
            accuracy=accuracy,
            auc=_rank_auc(y_test, p),
            chosen_params=getattr(model, "chosen_params_", None)
            or {"C": getattr(model, "chosen_C_", None)},
        ))
        all_records.extend(records)
        probs_all.append(p)
        labels_all.append(y_test)
    probs = np.concatenate(probs_all)
    labels = np.concatenate(labels_all)
    nets = np.array([r.net_return for r in all_records])
    intervals = {
        name: block_bootstrap_ci(nets, name, n_boot=n_boot, block=block, level=level, rng_seed=seed)
        for name in ("sharpe", "cagr")
    }
    return BacktestReport(
        folds=folds,
        records=all_records,
        metrics=perf_metrics(all_records, cost_rate),
        accuracy=float(((probs > 0.5).astype(int) == labels).mean()),
        auc=_rank_auc(labels, probs),
        intervals=intervals,
    )
