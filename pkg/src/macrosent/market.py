"""Price loading, log returns, direction labels, and rolling realized volatility."""

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

TRADING_DAYS_PER_YEAR = 252
DEFAULT_VOL_WINDOW = 20


@dataclass(frozen=True)
class PriceBar:
    date: dt.date
    close: float


@dataclass(frozen=True)
class ReturnPoint:
    """Log return realized at `date`; `start_date` is the previous close's date."""
    date: dt.date
    start_date: dt.date
    log_return: float


@dataclass(frozen=True)
class DirectionLabel:
    """1 if the return realized on the trading day after `date` was positive."""
    date: dt.date
    label: int


def load_prices(path) -> list[PriceBar]:
    """Load a `date,close` file; bars come back sorted by date.

    Duplicate dates, non-positive closes, and unparseable rows are hard errors
    (a price series is structural input, unlike dirty news feeds).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"price file not found: {path}")
    bars: list[PriceBar] = []
    seen: set[dt.date] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("date", "close"):
            if col not in (reader.fieldnames or []):
                raise DataError(f"price file {path} is missing column '{col}'")
        for lineno, row in enumerate(reader, start=2):
            try:
                date = dt.date.fromisoformat(row["date"].strip())
                close = float(row["close"])
            except (ValueError, AttributeError, TypeError) as exc:
                raise DataError(f"price file {path} line {lineno}: {exc}") from exc
            if close <= 0:
                raise DataError(f"price file {path} line {lineno}: non-positive close {close}")
            if date in seen:
                raise DataError(f"price file {path}: duplicate date {date.isoformat()}")
            seen.add(date)
            bars.append(PriceBar(date, close))
    bars.sort(key=lambda b: b.date)
    return bars


def log_returns(prices: list[PriceBar]) -> list[ReturnPoint]:
    """ln(P_{t+1} / P_t), one point per consecutive bar pair, dated at t+1."""
    if len(prices) < 2:
        raise DataError(f"need at least 2 price bars, got {len(prices)}")
    out = []
    for prev, cur in zip(prices, prices[1:]):
        out.append(ReturnPoint(
            date=cur.date,
            start_date=prev.date,
            log_return=math.log(cur.close) - math.log(prev.close),
        ))
    return out


def direction_labels(returns: list[ReturnPoint]) -> list[DirectionLabel]:
    """Label each feature date t with the sign of the next day's return.

    A zero return maps to 0 (a downward or flat move counts as down).
    """
    return [
        DirectionLabel(date=r.start_date, label=1 if r.log_return > 0 else 0)
        for r in returns
    ]


def realized_vol(returns: list[ReturnPoint], window: int = DEFAULT_VOL_WINDOW) -> list[float]:
    """Annualized rolling sample std of log returns, aligned to the return dates.

    Entry i is the std (1/(w-1)) of returns[i-w+1 .. i] times sqrt(252); the first
    w-1 entries are NaN missing markers, never silent zeros.
    """
    if window < 2:
        raise DataError(f"vol window must be >= 2, got {window}")
    values = [r.log_return for r in returns]
    out: list[float] = []
    for i in range(len(values)):
        if i < window - 1:
            out.append(float("nan"))
            continue
        chunk = values[i - window + 1: i + 1]
        mean = sum(chunk) / window
        var = sum((v - mean) ** 2 for v in chunk) / (window - 1)
        out.append(math.sqrt(var) * math.sqrt(TRADING_DAYS_PER_YEAR))
    return out
