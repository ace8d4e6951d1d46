"""Trading-calendar alignment and assembly of the model feature matrix.

Feature rows exist only where every lag and rolling window is fully populated with
valid (news-carrying) days: the first `warm_up` aligned rows are consumed as window
history and any row whose 20-day window touches a zero-news day is dropped rather
than imputed. Everything a row contains is known by the close of its date; the label
and the realized return it pairs with belong to the following trading day.
"""

import csv
import datetime as dt
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DataError
from .market import DirectionLabel, ReturnPoint
from .sentiment import DailySentiment
from .validation import as_float_matrix

WARM_UP = 20
LAGS = (1, 2, 3)
MA_SHORT = 5
MA_LONG = 20
ROLL_STD_WINDOWS = (5, 10)
ROLL_SUM_WINDOWS = (5, 10)

FEATURE_NAMES = (
    "sentiment_mean",
    "sentiment_std",
    "log_volume",
    "article_impact",
    "goldstein_mean",
    "goldstein_std",
    "sentiment_lag1",
    "sentiment_lag2",
    "sentiment_lag3",
    "sentiment_std_lag1",
    "sentiment_std_lag2",
    "sentiment_std_lag3",
    "log_volume_lag1",
    "log_volume_lag2",
    "log_volume_lag3",
    "goldstein_mean_lag1",
    "goldstein_mean_lag2",
    "goldstein_mean_lag3",
    "sentiment_ma5",
    "sentiment_ma20",
    "sentiment_accel",
    "sentiment_roll_std5",
    "sentiment_roll_std10",
    "volume_sum5",
    "volume_sum10",
    "return_lag1",
    "volatility_20d",
)


def merge_calendar(
    sentiment: list[DailySentiment],
    trading_dates: list[dt.date],
    pool_non_trading: bool = True,
) -> list[DailySentiment]:
    """Map sentiment days onto the trading calendar, one row per trading day.

    Non-trading-day sentiment is pooled into the next trading day (count-weighted
    means, exact population-variance recombination); with pooling off it is dropped.
    Trading days with no news become volume-0 rows that downstream validity trimming
    removes. Sentiment dated after the last trading day has no pool target and is
    dropped.
    """
    if not trading_dates:
        raise DataError("empty trading calendar")
    trading = sorted(trading_dates)
    groups: dict[dt.date, list[DailySentiment]] = {d: [] for d in trading}
    for day in sentiment:
        if day.date in groups:
            groups[day.date].append(day)
            continue
        if not pool_non_trading:
            continue
        target = _next_trading_day(day.date, trading)
        if target is not None:
            groups[target].append(day)
    return [_combine_days(date, groups[date]) for date in trading]


def _next_trading_day(date: dt.date, trading: list[dt.date]) -> dt.date | None:
    # trading is sorted; binary search for the first day strictly after `date`
    lo, hi = 0, len(trading)
    while lo < hi:
        mid = (lo + hi) // 2
        if trading[mid] <= date:
            lo = mid + 1
        else:
            hi = mid
    return trading[lo] if lo < len(trading) else None


def _combine_days(date: dt.date, parts: list[DailySentiment]) -> DailySentiment:
    parts = [p for p in parts if p.volume > 0]
    if not parts:
        return DailySentiment.empty(date)
    if len(parts) == 1 and parts[0].date == date:
        return parts[0]  # nothing pooled in; pass the row through untouched
    n = sum(p.volume for p in parts)
    s_mean, s_std = _pooled_stats(
        [(p.volume, p.mean_sentiment, p.sentiment_std) for p in parts], n)
    g_mean, g_std = _pooled_stats(
        [(p.volume, p.goldstein_mean, p.goldstein_std) for p in parts], n)
    log_volume = math.log1p(n)
    return DailySentiment(
        date=date,
        mean_sentiment=s_mean,
        sentiment_std=s_std,
        volume=n,
        log_volume=log_volume,
        article_impact=s_mean * log_volume,
        goldstein_mean=g_mean,
        goldstein_std=g_std,
    )


def _pooled_stats(parts: list[tuple[int, float, float]], n: int) -> tuple[float, float]:
    # Exact recombination of population moments: E[x^2] per part is var + mean^2.
    mean = sum(cnt * m for cnt, m, _ in parts) / n
    second = sum(cnt * (s * s + m * m) for cnt, m, s in parts) / n
    var = max(second - mean * mean, 0.0)
    return mean, math.sqrt(var)


@dataclass(frozen=True)
class AlignedDay:
    """One trading day t with everything known at its close plus its t+1 outcome."""
    date: dt.date
    sent: DailySentiment
    lag_return: float       # r_t, realized at t's close
    vol20: float            # may be NaN inside the vol warm-up
    label: int              # y_t, direction of r_{t+1}
    next_return: float      # r_{t+1}, realized at the next trading day's close


def align_trading_days(
    merged: list[DailySentiment],
    returns: list[ReturnPoint],
    labels: list[DirectionLabel],
    vol: list[float],
) -> list[AlignedDay]:
    """Zip the per-day inputs by date, keeping days where r_t, y_t, and r_{t+1} exist."""
    sent_by_date = {s.date: s for s in merged}
    ret_by_date = {r.date: r.log_return for r in returns}
    next_ret_by_start = {r.start_date: r.log_return for r in returns}
    label_by_date = {l.date: l.label for l in labels}
    vol_by_date = {r.date: v for r, v in zip(returns, vol)}
    out = []
    for date in sorted(sent_by_date):
        if date not in ret_by_date or date not in next_ret_by_start or date not in label_by_date:
            continue
        out.append(AlignedDay(
            date=date,
            sent=sent_by_date[date],
            lag_return=ret_by_date[date],
            vol20=vol_by_date[date],
            label=label_by_date[date],
            next_return=next_ret_by_start[date],
        ))
    return out


@dataclass
class FeatureMatrix:
    dates: list[dt.date]
    X: np.ndarray
    feature_names: tuple[str, ...]
    y: np.ndarray
    next_returns: np.ndarray

    def __len__(self) -> int:
        return len(self.dates)


def build_feature_matrix(aligned: list[AlignedDay], warm_up: int = WARM_UP) -> FeatureMatrix:
    """Assemble the per-day feature rows from aligned inputs.

    A row at position t (0-based within `aligned`) is emitted iff t >= warm_up, every
    day in its longest lookback window [t-19, t] carries news, and its own market
    fields are populated. Windows are trading-day windows over the aligned sequence.
    """
    n = len(aligned)
    if n <= warm_up:
        raise DataError(f"need more than warm_up={warm_up} aligned days, got {n}")

    s = np.array([d.sent.mean_sentiment for d in aligned])
    s_std = np.array([d.sent.sentiment_std for d in aligned])
    logv = np.array([d.sent.log_volume for d in aligned])
    ai = np.array([d.sent.article_impact for d in aligned])
    g = np.array([d.sent.goldstein_mean for d in aligned])
    g_std = np.array([d.sent.goldstein_std for d in aligned])
    vol_raw = np.array([float(d.sent.volume) for d in aligned])
    valid = np.array([d.sent.valid for d in aligned], dtype=bool)
    lag_ret = np.array([d.lag_return for d in aligned])
    vol20 = np.array([d.vol20 for d in aligned])

    rows, dates, ys, next_rets = [], [], [], []
    for t in range(warm_up, n):
        lo = t - MA_LONG + 1  # longest lookback any feature uses
        if lo < 0 or not valid[lo: t + 1].all():
            continue
        if not math.isfinite(vol20[t]):
            continue
        ma5 = s[t - MA_SHORT + 1: t + 1].mean()
        ma20 = s[t - MA_LONG + 1: t + 1].mean()
        row = [
            s[t], s_std[t], logv[t], ai[t], g[t], g_std[t],
            s[t - 1], s[t - 2], s[t - 3],
            s_std[t - 1], s_std[t - 2], s_std[t - 3],
            logv[t - 1], logv[t - 2], logv[t - 3],
            g[t - 1], g[t - 2], g[t - 3],
            ma5, ma20, ma5 - ma20,
            _sample_std(s[t - ROLL_STD_WINDOWS[0] + 1: t + 1]),
            _sample_std(s[t - ROLL_STD_WINDOWS[1] + 1: t + 1]),
            vol_raw[t - ROLL_SUM_WINDOWS[0] + 1: t + 1].sum(),
            vol_raw[t - ROLL_SUM_WINDOWS[1] + 1: t + 1].sum(),
            lag_ret[t], vol20[t],
        ]
        rows.append(row)
        dates.append(aligned[t].date)
        ys.append(aligned[t].label)
        next_rets.append(aligned[t].next_return)
    if not rows:
        raise DataError("no valid feature rows after warm-up and gap trimming")
    return FeatureMatrix(
        dates=dates,
        X=np.array(rows, dtype=np.float64),
        feature_names=FEATURE_NAMES,
        y=np.array(ys, dtype=np.int64),
        next_returns=np.array(next_rets, dtype=np.float64),
    )


def _sample_std(values: np.ndarray) -> float:
    mean = values.mean()
    return math.sqrt(((values - mean) ** 2).sum() / (len(values) - 1))


def save_feature_matrix(matrix: FeatureMatrix, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *matrix.feature_names, "label", "next_return"])
        for i, date in enumerate(matrix.dates):
            writer.writerow([
                date.isoformat(),
                *[repr(float(v)) for v in matrix.X[i]],
                int(matrix.y[i]),
                repr(float(matrix.next_returns[i])),
            ])


def load_feature_matrix(path) -> FeatureMatrix:
    dates, rows, ys, rets = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "date" or header[-2:] != ["label", "next_return"]:
            raise DataError(f"feature file {path} has an unexpected header")
        names = tuple(header[1:-2])
        for row in reader:
            dates.append(dt.date.fromisoformat(row[0]))
            rows.append([float(v) for v in row[1:-2]])
            ys.append(int(row[-2]))
            rets.append(float(row[-1]))
    if not rows:
        raise DataError(f"feature file {path} is empty")
    return FeatureMatrix(
        dates=dates,
        X=np.array(rows, dtype=np.float64),
        feature_names=names,
        y=np.array(ys, dtype=np.int64),
        next_returns=np.array(rets, dtype=np.float64),
    )


class ZScoreScaler(BaseEstimator, TransformerMixin):
    """Z-scores from training-set statistics (population std).

    Constant features (std 0) pass through unscaled and are flagged in
    ``constant_mask_``. Applying a fold's scaler to its test slice therefore uses no
    test statistics.
    """

    def fit(self, X, y=None):
        X = as_float_matrix(X)
        self.mean_ = X.mean(axis=0)
        self.scale_ = X.std(axis=0)  # population convention
        self.constant_mask_ = self.scale_ == 0.0
        return self

    def transform(self, X):
        X = as_float_matrix(X)
        if X.shape[1] != self.mean_.shape[0]:
            raise ValueError(
                f"feature count mismatch: scaler saw {self.mean_.shape[0]}, got {X.shape[1]}"
            )
        out = X.copy()
        live = ~self.constant_mask_
        out[:, live] = (X[:, live] - self.mean_[live]) / self.scale_[live]
        return out
