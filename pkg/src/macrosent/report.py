"""Serialization of backtest results: metrics tables, daily records, bootstrap CIs."""

import csv
import datetime as dt
from pathlib import Path

from .backtest import BacktestReport, BootstrapInterval, PerfMetrics
from .errors import DataError

METRIC_COLUMNS = (
    "CAGR (%)", "Sharpe", "Vol (%)", "Max DD (%)", "Win (%)",
    "Total Ret. (%)", "# Trades", "Cost",
)


def _fmt(value: float | None) -> str:
    return "NA" if value is None else format(value, ".6g")


def _metric_row(m: PerfMetrics) -> list[str]:
    return [
        _fmt(m.cagr * 100.0),
        _fmt(m.sharpe),
        _fmt(m.ann_vol * 100.0),
        _fmt(m.max_drawdown * 100.0),
        _fmt(m.win_pct),
        _fmt(m.total_return * 100.0),
        str(m.n_trades),
        _fmt(m.cum_cost),
    ]


def save_metrics_table(report: BacktestReport, path) -> None:
    """One row per fold plus the aggregate, columns named as in the results table."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", *METRIC_COLUMNS])
        for fold in report.folds:
            writer.writerow([str(fold.fold), *_metric_row(fold.metrics)])
        writer.writerow(["aggregate", *_metric_row(report.metrics)])


def save_daily_records(report: BacktestReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "proba", "position", "market_ret", "net_ret", "trade"])
        for r in report.records:
            stamp = r.date.isoformat() if isinstance(r.date, dt.date) else str(r.date)
            writer.writerow([
                stamp, repr(float(r.proba)), str(r.position),
                repr(float(r.market_return)), repr(float(r.net_return)), str(int(r.trade)),
            ])


def save_bootstrap_summary(intervals: dict[str, BootstrapInterval], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statistic", "lower", "upper", "n_boot", "block", "seed"])
        for name in sorted(intervals):
            ci = intervals[name]
            writer.writerow([
                ci.statistic, repr(ci.lower), repr(ci.upper),
                str(ci.n_boot), str(ci.block), str(ci.seed),
            ])


def merge_summaries(metric_files: list[tuple[str, str, Path]], path) -> None:
    """Combine per-(asset, model) aggregate rows into one results-table-shaped file."""
    rows = []
    for asset, model, metrics_path in metric_files:
        with open(metrics_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["fold", *METRIC_COLUMNS]:
                raise DataError(f"metrics file {metrics_path} has an unexpected header")
            aggregate = None
            for row in reader:
                if row and row[0] == "aggregate":
                    aggregate = row[1:]
            if aggregate is None:
                raise DataError(f"metrics file {metrics_path} has no aggregate row")
            rows.append([asset, model, *aggregate])
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Asset", "Model", *METRIC_COLUMNS])
        writer.writerows(rows)
