"""Headline polarity scores and the six daily sentiment aggregates.

Daily aggregates per date t with N_t scored headlines:

    mean_sentiment   S = mean of polarities
    sentiment_std    population (1/N) std of polarities
    volume           N
    log_volume       ln(1 + N)
    article_impact   S * ln(1 + N)
    goldstein_mean   mean of per-headline Goldstein values
    goldstein_std    population (1/N) std of Goldstein values

The population convention is deliberate: a single-headline day has std 0, not an
undefined value. Natural log throughout.
"""

import datetime as dt
import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DataError

PROB_SUM_TOL = 1e-6
GOLDSTEIN_RANGE = (-10.0, 10.0)
# Fraction of rejected lines above which a score file is considered broken.
MAX_REJECT_FRACTION = 0.01

SCORE_KEYS = ("date", "headline", "p_neg", "p_neu", "p_pos", "goldstein")

_TOKEN_RE = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class ClassProbs:
    p_neg: float
    p_neu: float
    p_pos: float

    def validate(self) -> None:
        for name, p in (("p_neg", self.p_neg), ("p_neu", self.p_neu), ("p_pos", self.p_pos)):
            if not (0.0 <= p <= 1.0):
                raise DataError(f"{name}={p} outside [0, 1]")
        total = self.p_neg + self.p_neu + self.p_pos
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise DataError(f"class probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class ScoredHeadline:
    date: dt.date
    polarity: float
    goldstein_scale: float
    probs: ClassProbs
    headline: str


@dataclass(frozen=True)
class DailySentiment:
    date: dt.date
    mean_sentiment: float
    sentiment_std: float
    volume: int
    log_volume: float
    article_impact: float
    goldstein_mean: float
    goldstein_std: float

    @property
    def valid(self) -> bool:
        return self.volume > 0

    @classmethod
    def empty(cls, date: dt.date) -> "DailySentiment":
        nan = float("nan")
        return cls(date, nan, nan, 0, 0.0, nan, nan, nan)


def polarity(probs: ClassProbs) -> float:
    """Net bullishness p_pos - p_neg, in [-1, 1]."""
    probs.validate()
    return probs.p_pos - probs.p_neg


def load_lexicon(path=None) -> dict[str, int]:
    """Load the signed word list (+1 bullish / -1 bearish)."""
    if path is None:
        text = resources.files("macrosent").joinpath("data/lexicon.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    lexicon: dict[str, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sign, word = line[0], line[1:].strip().lower()
        if sign not in "+-" or not word:
            raise DataError(f"bad lexicon line: {line!r}")
        lexicon[word] = 1 if sign == "+" else -1
    return lexicon


_DEFAULT_LEXICON: dict[str, int] | None = None


def _default_lexicon() -> dict[str, int]:
    global _DEFAULT_LEXICON
    if _DEFAULT_LEXICON is None:
        _DEFAULT_LEXICON = load_lexicon()
    return _DEFAULT_LEXICON


def lexicon_score(text: str, lexicon: dict[str, int] | None = None) -> ClassProbs:
    """Deterministic fallback scorer: additively smoothed hit counts.

    With a bullish hits, b bearish hits, and m total tokens, the smoothed
    probabilities are (a+1)/(a+b+m+3), (m+1)/(a+b+m+3), (b+1)/(a+b+m+3) for
    positive/neutral/negative; they are each > 0 and sum to exactly 1. Empty
    text scores the uniform (1/3, 1/3, 1/3).
    """
    if lexicon is None:
        lexicon = _default_lexicon()
    tokens = [t for t in _TOKEN_RE.split(text.lower()) if t]
    a = sum(1 for t in tokens if lexicon.get(t) == 1)
    b = sum(1 for t in tokens if lexicon.get(t) == -1)
    m = len(tokens)
    denom = a + b + m + 3
    return ClassProbs(p_neg=(b + 1) / denom, p_neu=(m + 1) / denom, p_pos=(a + 1) / denom)


def write_headline_scores(path, scored: list[ScoredHeadline]) -> None:
    """Write the line-delimited JSON score file (the contract with external scorers)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in scored:
            fh.write(json.dumps({
                "date": s.date.isoformat(),
                "headline": s.headline,
                "p_neg": s.probs.p_neg,
                "p_neu": s.probs.p_neu,
                "p_pos": s.probs.p_pos,
                "goldstein": s.goldstein_scale,
            }) + "\n")


def load_headline_scores(path) -> tuple[list[ScoredHeadline], list[tuple[int, str]]]:
    """Load a score file, rejecting invalid lines with their line numbers.

    Polarity is always recomputed from the probabilities; a stored polarity field is
    ignored. More than MAX_REJECT_FRACTION rejected lines raises DataError (a broken
    producer, not dirty data).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"score file not found: {path}")
    scored: list[ScoredHeadline] = []
    rejected: list[tuple[int, str]] = []
    n_lines = 0
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            n_lines += 1
            try:
                obj = json.loads(line)
                missing = [k for k in SCORE_KEYS if k not in obj]
                if missing:
                    raise DataError(f"missing keys {missing}")
                probs = ClassProbs(float(obj["p_neg"]), float(obj["p_neu"]), float(obj["p_pos"]))
                probs.validate()
                goldstein = float(obj["goldstein"])
                if not (GOLDSTEIN_RANGE[0] <= goldstein <= GOLDSTEIN_RANGE[1]):
                    raise DataError(f"goldstein {goldstein} outside {GOLDSTEIN_RANGE}")
                headline = str(obj["headline"])
                scored.append(ScoredHeadline(
                    date=dt.date.fromisoformat(obj["date"]),
                    polarity=probs.p_pos - probs.p_neg,
                    goldstein_scale=goldstein,
                    probs=probs,
                    headline=headline,
                ))
            except (DataError, ValueError, TypeError, json.JSONDecodeError) as exc:
                rejected.append((lineno, str(exc)))
    if n_lines and len(rejected) > MAX_REJECT_FRACTION * n_lines:
        raise DataError(
            f"score file {path}: {len(rejected)}/{n_lines} lines rejected "
            f"(first: line {rejected[0][0]}: {rejected[0][1]})"
        )
    return scored, rejected


def _population_stats(values: list[float]) -> tuple[float, float]:
    # fsum makes the aggregates exactly rounded, hence order-independent.
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def aggregate_daily(headlines: list[ScoredHeadline]) -> list[DailySentiment]:
    """Collapse scored headlines into one DailySentiment per date, sorted by date."""
    if not headlines:
        raise DataError("aggregate_daily requires a non-empty headline list")
    by_date: dict[dt.date, list[ScoredHeadline]] = {}
    for h in headlines:
        by_date.setdefault(h.date, []).append(h)
    out: list[DailySentiment] = []
    for date in sorted(by_date):
        group = by_date[date]
        n = len(group)
        s_mean, s_std = _population_stats([h.polarity for h in group])
        g_mean, g_std = _population_stats([h.goldstein_scale for h in group])
        log_volume = math.log1p(n)
        out.append(DailySentiment(
            date=date,
            mean_sentiment=s_mean,
            sentiment_std=s_std,
            volume=n,
            log_volume=log_volume,
            article_impact=s_mean * log_volume,
            goldstein_mean=g_mean,
            goldstein_std=g_std,
        ))
    return out
