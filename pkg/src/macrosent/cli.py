"""Batch pipeline entry point: ingest -> score -> features -> backtest -> explain -> report.

Each stage reads the previous stage's artifact from the output directory and is
idempotent: the same inputs, config, and seed produce byte-identical outputs. Exit
codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
import shutil
import sys
from pathlib import Path

from . import features as feats
from . import ingest, market, sentiment
from .backtest import ModelSpec, run_backtest
from .config import RunConfig, load_config, save_config
from .errors import BacktestError, DataError
from .explain import (
    linear_contributions,
    save_ranking_csv,
    save_shap_csv,
    shap_global_ranking,
    tree_shap,
)
from .models.serialize import save_model
from .models.tuning import train_gbt, train_logistic
from .report import merge_summaries, save_bootstrap_summary, save_daily_records, save_metrics_table
from .splits import clamped_internal_splits


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _stage_path(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out) / name


def _require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise DataError(f"missing {path}; run `{stage}` first")
    return path


def _tagged(cfg: RunConfig, stem: str, suffix: str = ".csv") -> Path:
    return _stage_path(cfg, f"{stem}_{cfg.asset}_{cfg.model}{suffix}")


def cmd_ingest(cfg: RunConfig) -> None:
    events, skipped = ingest.parse_events(cfg.events)
    macro = ingest.filter_macro_events(events)
    top = ingest.select_top_daily(macro, k=cfg.top_k)
    store = ingest.HeadlineStore.from_path(cfg.headline_store)
    headlines, dropped = ingest.resolve_headlines(top, store)
    out = _stage_path(cfg, "headlines.csv")
    ingest.write_headline_file(out, headlines)
    print(f"ingest: {len(headlines)} headlines ({skipped} rows skipped, {dropped} unresolved) -> {out}")


def cmd_score(cfg: RunConfig) -> None:
    out = _stage_path(cfg, "scores.jsonl")
    if cfg.scores:
        scored, rejected = sentiment.load_headline_scores(cfg.scores)
        shutil.copyfile(cfg.scores, out)
        print(f"score: validated external scores ({len(scored)} rows, "
              f"{len(rejected)} rejected) -> {out}")
        return
    headlines = ingest.read_headline_file(_require(_stage_path(cfg, "headlines.csv"), "ingest"))
    scored = []
    for h in headlines:
        probs = sentiment.lexicon_score(h.headline)
        scored.append(sentiment.ScoredHeadline(
            date=h.date,
            polarity=sentiment.polarity(probs),
            goldstein_scale=h.goldstein_scale,
            probs=probs,
            headline=h.headline,
        ))
    sentiment.write_headline_scores(out, scored)
    print(f"score: lexicon-scored {len(scored)} headlines -> {out}")


def cmd_features(cfg: RunConfig) -> None:
    scored, _ = sentiment.load_headline_scores(_require(_stage_path(cfg, "scores.jsonl"), "score"))
    prices = market.load_prices(cfg.prices)
    daily = sentiment.aggregate_daily(scored)
    merged = feats.merge_calendar(daily, [p.date for p in prices], pool_non_trading=cfg.pool_weekend)
    returns = market.log_returns(prices)
    labels = market.direction_labels(returns)
    vol = market.realized_vol(returns)
    aligned = feats.align_trading_days(merged, returns, labels, vol)
    matrix = feats.build_feature_matrix(aligned, warm_up=cfg.warm_up)
    out = _stage_path(cfg, "features.csv")
    feats.save_feature_matrix(matrix, out)
    print(f"features: {len(matrix)} rows x {len(matrix.feature_names)} features -> {out}")


def _model_spec(cfg: RunConfig) -> ModelSpec:
    return ModelSpec(
        kind=cfg.model,
        c_grid=tuple(cfg.c_grid),
        gbt_grid=cfg.gbt_grid(),
        internal_splits=cfg.internal_splits,
    )


def cmd_backtest(cfg: RunConfig) -> None:
    matrix = feats.load_feature_matrix(_require(_stage_path(cfg, "features.csv"), "features"))
    report = run_backtest(
        matrix,
        _model_spec(cfg),
        cost_rate=cfg.cost_rate,
        k=cfg.k_splits,
        n_boot=cfg.n_boot,
        block=cfg.block,
        level=cfg.ci_level,
        seed=cfg.seed,
    )
    save_metrics_table(report, _tagged(cfg, "metrics"))
    save_daily_records(report, _tagged(cfg, "daily"))
    save_bootstrap_summary(report.intervals, _tagged(cfg, "bootstrap"))
    save_config(cfg, _stage_path(cfg, "resolved_config.txt"))
    sharpe = report.metrics.sharpe
    print(f"backtest: {len(report.records)} OOS days, accuracy {report.accuracy:.4f}, "
          f"sharpe {'NA' if sharpe is None else format(sharpe, '.4f')} -> {_tagged(cfg, 'metrics')}")


def cmd_explain(cfg: RunConfig) -> None:
    matrix = feats.load_feature_matrix(_require(_stage_path(cfg, "features.csv"), "features"))
    cv = clamped_internal_splits(len(matrix), cfg.internal_splits)
    if cfg.model == "gbt":
        model = train_gbt(matrix.X, matrix.y, grid=cfg.gbt_grid(), cv=cv)
        shap = tree_shap(model, matrix.X, feature_names=matrix.feature_names, dates=matrix.dates)
    else:
        scaler = feats.ZScoreScaler().fit(matrix.X)
        model = train_logistic(scaler.transform(matrix.X), matrix.y,
                               c_grid=tuple(cfg.c_grid), cv=cv)
        shap = linear_contributions(model, scaler.transform(matrix.X),
                                    feature_names=matrix.feature_names, dates=matrix.dates)
    save_shap_csv(shap, _tagged(cfg, "shap"))
    ranking = shap_global_ranking(shap)
    save_ranking_csv(ranking, _tagged(cfg, "shap_ranking"))
    save_model(model, _tagged(cfg, "model", suffix=".json"))
    top = ", ".join(name for name, _ in ranking[:3])
    print(f"explain: top features [{top}] -> {_tagged(cfg, 'shap')}")


def cmd_report(cfg: RunConfig) -> None:
    out_dir = Path(cfg.out)
    metric_files = []
    for path in sorted(out_dir.glob("metrics_*.csv")):
        parts = path.stem.split("_")
        if len(parts) < 3:
            continue
        asset, model = "_".join(parts[1:-1]), parts[-1]
        metric_files.append((asset, model, path))
    if not metric_files:
        raise DataError(f"no metrics_*.csv files in {out_dir}; run `backtest` first")
    out = _stage_path(cfg, "summary.csv")
    merge_summaries(metric_files, out)
    print(f"report: merged {len(metric_files)} runs -> {out}")


_COMMANDS = {
    "ingest": cmd_ingest,
    "score": cmd_score,
    "features": cmd_features,
    "backtest": cmd_backtest,
    "explain": cmd_explain,
    "report": cmd_report,
}

_FLAG_TO_FIELD = {
    "events": "events",
    "store": "headline_store",
    "scores": "scores",
    "prices": "prices",
    "out": "out",
    "asset": "asset",
    "model": "model",
    "cost_rate": "cost_rate",
    "k": "k_splits",
    "seed": "seed",
    "warm_up": "warm_up",
    "top_k": "top_k",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="macrosent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} stage")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--seed", type=int, help="rng seed (overrides config)")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--events", help="event file path")
        p.add_argument("--store", help="headline store path")
        p.add_argument("--scores", help="externally produced score file")
        p.add_argument("--prices", help="price file path")
        p.add_argument("--asset", help="asset identifier used in output names")
        p.add_argument("--model", choices=["gbt", "logistic"], help="model kind")
        p.add_argument("--cost-rate", dest="cost_rate", type=float, help="round-trip cost rate")
        p.add_argument("--k", type=int, help="number of expanding folds")
        p.add_argument("--warm-up", dest="warm_up", type=int, help="feature warm-up rows")
        p.add_argument("--top-k", dest="top_k", type=int, help="events kept per day")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    for flag, field_name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, field_name, value)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg)
    except (DataError, BacktestError) as exc:
        print(f"macrosent {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
