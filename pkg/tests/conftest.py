import csv
import datetime as dt
import math

import numpy as np
import pytest

from macrosent.features import FeatureMatrix
from macrosent.models.boosting import BoostedTreesClassifier
from macrosent.models.tree import RegressionTree

POSITIVE_TEXTS = [
    "markets rally on strong growth and optimism",
    "recovery gains momentum as stimulus deal beats expectations",
    "surge in confidence lifts hopes of expansion",
    "trade agreement brings progress and calm",
]
NEGATIVE_TEXTS = [
    "recession fears spark selloff and panic",
    "crisis deepens as losses mount and tensions rise",
    "weak data fuels worries of default and turmoil",
    "sanctions and conflict drive instability",
]
NEUTRAL_TEXTS = [
    "officials meet to discuss policy options",
    "central bank reviews quarterly projections",
    "ministers gather for scheduled talks",
]


def weekday_span(start: dt.date, n_days: int) -> list[dt.date]:
    """First n_days weekdays from start."""
    out, d = [], start
    while len(out) < n_days:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def write_price_file(path, dates, closes):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "close"])
        for d, c in zip(dates, closes):
            writer.writerow([d.isoformat(), repr(float(c))])


@pytest.fixture
def pipeline_files(tmp_path):
    """Synthetic event/headline/price inputs covering ~8 months of weekdays."""
    rng = np.random.default_rng(7)
    start = dt.date(2021, 1, 4)
    trading = weekday_span(start, 170)
    closes = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.006, size=len(trading))))
    prices_path = tmp_path / "prices.csv"
    write_price_file(prices_path, trading, closes)

    texts = POSITIVE_TEXTS + NEGATIVE_TEXTS + NEUTRAL_TEXTS
    events_path = tmp_path / "events.csv"
    store_path = tmp_path / "store.csv"
    url_no = 0
    with open(events_path, "w", newline="", encoding="utf-8") as ef, \
         open(store_path, "w", newline="", encoding="utf-8") as sf:
        ew = csv.writer(ef)
        sw = csv.writer(sf)
        ew.writerow(["date", "event_type", "goldstein_scale", "num_articles", "url"])
        sw.writerow(["url", "headline"])
        day = trading[0] - dt.timedelta(days=2)  # include a lead-in weekend
        while day <= trading[-1]:
            for _ in range(int(rng.integers(3, 7))):
                url = f"http://news.example/{url_no}"
                url_no += 1
                code = int(rng.choice([42, 110, 130, 150, 173, 190, 210]))
                ew.writerow([
                    day.isoformat(), code,
                    repr(float(rng.uniform(-8, 8))),
                    int(rng.integers(1, 400)), url,
                ])
                sw.writerow([url, texts[int(rng.integers(0, len(texts)))]])
            day += dt.timedelta(days=1)
    return {"events": events_path, "store": store_path, "prices": prices_path, "dir": tmp_path}


def make_matrix(n_rows: int, n_features: int, seed: int, planted: str | None = None) -> FeatureMatrix:
    """Synthetic feature matrix; `planted` wires the label to the features.

    planted="tree": y = 1{feature_1 > 0}. planted="linear": y = 1{X @ w > 0}.
    planted=None: y is an independent coin flip. Returns are sign-consistent with y.
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_rows, n_features))
    if planted == "tree":
        y = (X[:, 1] > 0).astype(int)
    elif planted == "linear":
        w = rng.normal(size=n_features)
        y = (X @ w > 0).astype(int)
    else:
        y = rng.integers(0, 2, size=n_rows)
    magnitudes = np.abs(rng.normal(0.004, 0.002, size=n_rows)) + 1e-4
    next_returns = np.where(y == 1, magnitudes, -magnitudes)
    dates = [dt.date(2015, 1, 1) + dt.timedelta(days=i) for i in range(n_rows)]
    return FeatureMatrix(
        dates=dates,
        X=X,
        feature_names=tuple(f"feature_{j}" for j in range(n_features)),
        y=y,
        next_returns=next_returns,
    )


def random_tree(rng: np.random.Generator, n_features: int, max_depth: int) -> RegressionTree:
    """Random tree with internally consistent covers (children sum to the parent)."""
    feature, threshold, left, right, value, cover = [], [], [], [], [], []

    def grow(depth: int, cov: float) -> int:
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        cover.append(cov)
        if depth < max_depth and rng.random() < 0.8:
            feature[node] = int(rng.integers(0, n_features))
            threshold[node] = float(rng.normal())
            frac = float(rng.uniform(0.2, 0.8))
            left[node] = grow(depth + 1, cov * frac)
            right[node] = grow(depth + 1, cov * (1.0 - frac))
        else:
            value[node] = float(rng.normal())
        return node

    grow(0, float(rng.uniform(10.0, 100.0)))
    return RegressionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        cover=np.array(cover, dtype=np.float64),
    )


def random_gbt(
    rng: np.random.Generator, n_features: int, n_trees: int, max_depth: int
) -> BoostedTreesClassifier:
    model = BoostedTreesClassifier(learning_rate=float(rng.uniform(0.05, 0.3)))
    model.base_score_ = float(rng.normal())
    model.trees_ = [random_tree(rng, n_features, max_depth) for _ in range(n_trees)]
    model.n_features_in_ = n_features
    return model


def assert_close(actual: float, expected: float, tol: float = 1e-12):
    assert math.isfinite(actual), f"non-finite value {actual}"
    assert abs(actual - expected) <= tol, f"{actual} != {expected} within {tol}"
