import datetime as dt
import math
import random

import numpy as np
import pytest

from macrosent.errors import DataError
from macrosent.features import (
    FEATURE_NAMES,
    AlignedDay,
    ZScoreScaler,
    align_trading_days,
    build_feature_matrix,
    load_feature_matrix,
    merge_calendar,
    save_feature_matrix,
)
from macrosent.market import PriceBar, direction_labels, log_returns, realized_vol
from macrosent.sentiment import ClassProbs, DailySentiment, ScoredHeadline, aggregate_daily

MON = dt.date(2021, 1, 4)


def day(date, s=0.1, s_std=0.05, volume=10, g=1.0, g_std=0.5):
    logv = math.log1p(volume)
    return DailySentiment(date, s, s_std, volume, logv, s * logv, g, g_std)


def trading_days(n, start=MON):
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def test_merge_pools_weekend_into_monday():
    sat = day(dt.date(2021, 1, 2), s=0.2, volume=10)
    mon = day(MON, s=0.4, volume=30)
    merged = merge_calendar([sat, mon], [MON, MON + dt.timedelta(days=1)])
    assert merged[0].date == MON
    assert merged[0].volume == 40
    assert merged[0].mean_sentiment == pytest.approx(0.35, abs=1e-12)
    assert merged[0].article_impact == pytest.approx(0.35 * math.log1p(40), abs=1e-12)


def test_merge_pooling_matches_direct_aggregation():
    # Oracle: pooling statistics must equal aggregating the union of headlines as if
    # they had all carried the trading date.
    rng = random.Random(6)

    def headline(date):
        neg = rng.uniform(0, 0.5)
        pos = rng.uniform(0, 0.5)
        probs = ClassProbs(neg, 1 - neg - pos, pos)
        return ScoredHeadline(date, probs.p_pos - probs.p_neg, rng.uniform(-9, 9), probs, "h")

    sat_headlines = [headline(dt.date(2021, 1, 2)) for _ in range(5)]
    sun_headlines = [headline(dt.date(2021, 1, 3)) for _ in range(3)]
    mon_headlines = [headline(MON) for _ in range(7)]
    merged = merge_calendar(
        aggregate_daily(sat_headlines + sun_headlines + mon_headlines),
        [MON, MON + dt.timedelta(days=1)],
    )[0]
    relabeled = [
        ScoredHeadline(MON, h.polarity, h.goldstein_scale, h.probs, h.headline)
        for h in sat_headlines + sun_headlines + mon_headlines
    ]
    direct = aggregate_daily(relabeled)[0]
    assert merged.volume == direct.volume
    for field in ("mean_sentiment", "sentiment_std", "log_volume",
                  "article_impact", "goldstein_mean", "goldstein_std"):
        assert getattr(merged, field) == pytest.approx(getattr(direct, field), abs=1e-12)


def test_merge_identity_without_weekend_news():
    rows = [day(d, s=0.1 * i) for i, d in enumerate(trading_days(5))]
    merged = merge_calendar(rows, [r.date for r in rows])
    assert merged == rows


def test_merge_zero_news_day_invalid():
    cal = trading_days(3)
    merged = merge_calendar([day(cal[0]), day(cal[2])], cal)
    assert merged[1].volume == 0 and not merged[1].valid


def test_merge_drop_mode():
    sat = day(dt.date(2021, 1, 2), s=0.2, volume=10)
    mon = day(MON, s=0.4, volume=30)
    merged = merge_calendar([sat, mon], [MON], pool_non_trading=False)
    assert merged[0] == mon


def test_merge_empty_calendar():
    with pytest.raises(DataError):
        merge_calendar([day(MON)], [])


def make_aligned(n, sent_fn=None, ret_fn=None, start=MON):
    cal = trading_days(n, start=start)
    rng = random.Random(99)
    out = []
    for i, date in enumerate(cal):
        sent = sent_fn(i, date) if sent_fn else day(
            date, s=math.sin(i / 3.0) * 0.4, s_std=0.05 + 0.01 * (i % 4),
            volume=10 + (i % 6), g=math.cos(i / 5.0), g_std=0.3)
        r = ret_fn(i) if ret_fn else rng.uniform(-0.01, 0.01)
        out.append(AlignedDay(
            date=date, sent=sent, lag_return=r, vol20=0.1 + 0.001 * i,
            label=1 if r > 0 else 0, next_return=r,
        ))
    return out


def test_build_warm_up_row_count():
    matrix = build_feature_matrix(make_aligned(25), warm_up=20)
    assert len(matrix) == 5
    assert matrix.feature_names == FEATURE_NAMES
    assert matrix.X.shape == (5, len(FEATURE_NAMES))


def test_build_requires_enough_rows():
    with pytest.raises(DataError):
        build_feature_matrix(make_aligned(20), warm_up=20)


def test_build_constant_sentiment():
    aligned = make_aligned(30, sent_fn=lambda i, d: day(d, s=0.25, volume=10))
    matrix = build_feature_matrix(aligned)
    names = list(matrix.feature_names)
    for row in matrix.X:
        assert row[names.index("sentiment_ma5")] == pytest.approx(0.25, abs=1e-12)
        assert row[names.index("sentiment_ma20")] == pytest.approx(0.25, abs=1e-12)
        assert row[names.index("sentiment_accel")] == pytest.approx(0.0, abs=1e-12)
        assert row[names.index("sentiment_roll_std5")] == pytest.approx(0.0, abs=1e-12)
        assert row[names.index("sentiment_roll_std10")] == pytest.approx(0.0, abs=1e-12)


def test_build_lag_fields_are_previous_days_values():
    aligned = make_aligned(30)
    matrix = build_feature_matrix(aligned)
    names = list(matrix.feature_names)
    by_date = {d.date: d for d in aligned}
    dates = [d.date for d in aligned]
    for i, date in enumerate(matrix.dates):
        t = dates.index(date)
        row = matrix.X[i]
        assert row[names.index("sentiment_lag1")] == by_date[dates[t - 1]].sent.mean_sentiment
        assert row[names.index("sentiment_lag3")] == by_date[dates[t - 3]].sent.mean_sentiment
        assert row[names.index("log_volume_lag2")] == by_date[dates[t - 2]].sent.log_volume
        assert row[names.index("return_lag1")] == by_date[date].lag_return


def test_build_windows_match_naive_loop():
    aligned = make_aligned(60)
    matrix = build_feature_matrix(aligned)
    names = list(matrix.feature_names)
    s = [d.sent.mean_sentiment for d in aligned]
    vols = [d.sent.volume for d in aligned]
    dates = [d.date for d in aligned]
    for i, date in enumerate(matrix.dates):
        t = dates.index(date)
        row = matrix.X[i]
        ma5 = sum(s[t - 4: t + 1]) / 5.0
        ma20 = sum(s[t - 19: t + 1]) / 20.0
        assert abs(row[names.index("sentiment_ma5")] - ma5) <= 1e-12
        assert abs(row[names.index("sentiment_ma20")] - ma20) <= 1e-12
        assert abs(row[names.index("sentiment_accel")] - (ma5 - ma20)) <= 1e-12
        chunk = s[t - 9: t + 1]
        mean = sum(chunk) / 10.0
        roll10 = math.sqrt(sum((v - mean) ** 2 for v in chunk) / 9.0)
        assert abs(row[names.index("sentiment_roll_std10")] - roll10) <= 1e-12
        assert row[names.index("volume_sum5")] == sum(vols[t - 4: t + 1])
        assert row[names.index("volume_sum10")] == sum(vols[t - 9: t + 1])


def test_build_gap_contaminates_windows():
    aligned = make_aligned(50)
    gap_index = 30
    aligned[gap_index] = AlignedDay(
        date=aligned[gap_index].date,
        sent=DailySentiment.empty(aligned[gap_index].date),
        lag_return=aligned[gap_index].lag_return,
        vol20=aligned[gap_index].vol20,
        label=aligned[gap_index].label,
        next_return=aligned[gap_index].next_return,
    )
    matrix = build_feature_matrix(aligned)
    contaminated = {aligned[t].date for t in range(gap_index, min(gap_index + 20, 50))}
    assert not contaminated.intersection(matrix.dates)
    # accounting identity: rows = aligned - warm_up - invalid rows past warm-up
    invalid = sum(1 for t in range(20, 50) if not (
        all(aligned[j].sent.valid for j in range(t - 19, t + 1))))
    assert len(matrix) == 50 - 20 - invalid


def test_no_look_ahead_feature_rows():
    aligned = make_aligned(40)
    base = build_feature_matrix(aligned)
    cut = 30
    perturbed = list(aligned)
    for t in range(cut + 1, 40):
        perturbed[t] = AlignedDay(
            date=aligned[t].date,
            sent=day(aligned[t].date, s=-0.9, volume=500, g=-9.0),
            lag_return=aligned[t].lag_return + 0.05,
            vol20=aligned[t].vol20 * 3,
            label=1 - aligned[t].label,
            next_return=-aligned[t].next_return,
        )
    after = build_feature_matrix(perturbed)
    cut_date = aligned[cut].date
    keep = [i for i, d in enumerate(base.dates) if d <= cut_date]
    keep_after = [i for i, d in enumerate(after.dates) if d <= cut_date]
    assert [base.dates[i] for i in keep] == [after.dates[i] for i in keep_after]
    assert np.array_equal(base.X[keep], after.X[keep_after])
    assert np.array_equal(base.y[keep], after.y[keep_after])


def test_align_pairs_market_quantities_by_date():
    cal = trading_days(8)
    prices = [PriceBar(d, 100.0 * math.exp(0.001 * i * (-1) ** i)) for i, d in enumerate(cal)]
    returns = log_returns(prices)
    labels = direction_labels(returns)
    vol = realized_vol(returns, window=3)
    merged = [day(d) for d in cal]
    aligned = align_trading_days(merged, returns, labels, vol)
    # feature dates run from the second price date to the second-to-last
    assert [a.date for a in aligned] == cal[1:-1]
    for i, a in enumerate(aligned, start=1):
        assert a.lag_return == returns[i - 1].log_return
        assert a.next_return == returns[i].log_return
        assert a.label == (1 if returns[i].log_return > 0 else 0)


def test_matrix_round_trip(tmp_path):
    matrix = build_feature_matrix(make_aligned(30))
    path = tmp_path / "features.csv"
    save_feature_matrix(matrix, path)
    loaded = load_feature_matrix(path)
    assert loaded.dates == matrix.dates
    assert loaded.feature_names == matrix.feature_names
    assert np.array_equal(loaded.X, matrix.X)
    assert np.array_equal(loaded.y, matrix.y)
    assert np.array_equal(loaded.next_returns, matrix.next_returns)


def test_scaler_hand_values():
    scaler = ZScoreScaler().fit(np.array([[1.0], [2.0], [3.0]]))
    assert scaler.mean_[0] == pytest.approx(2.0, abs=1e-15)
    assert scaler.scale_[0] == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-15)
    scaled = scaler.transform(np.array([[1.0], [2.0], [3.0]]))
    assert scaled.sum() == pytest.approx(0.0, abs=1e-12)


def test_scaler_constant_feature_passthrough():
    X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
    scaler = ZScoreScaler().fit(X)
    assert scaler.constant_mask_.tolist() == [True, False]
    out = scaler.transform(X)
    assert np.array_equal(out[:, 0], X[:, 0])


def test_scaler_train_columns_center():
    rng = np.random.default_rng(3)
    X = rng.normal(2.0, 3.0, size=(50, 4))
    scaler = ZScoreScaler().fit(X)
    out = scaler.transform(X)
    assert np.abs(out.mean(axis=0)).max() < 1e-9


def test_scaler_no_test_statistics():
    rng = np.random.default_rng(4)
    X_train = rng.normal(size=(30, 3))
    scaler = ZScoreScaler().fit(X_train)
    X_test = rng.normal(size=(10, 3)) + 100.0
    out = scaler.transform(X_test)
    expected = (X_test - X_train.mean(axis=0)) / X_train.std(axis=0)
    assert np.allclose(out, expected, atol=1e-12)
