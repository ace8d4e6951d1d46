"""Event-file parsing, macro filtering, per-day top-K selection, and headline lookup.

The event file is comma-separated UTF-8 with RFC-4180 quoting and the normalized
header ``date,event_type,goldstein_scale,num_articles,url`` (``actor1``/``actor2``
optional). ``GDELT_COLUMN_MAP`` documents how a raw GDELT tab-delimited export maps
onto those names; ``convert_gdelt_export`` applies the mapping.

Ordering note: the per-day top-K ranking happens BEFORE headline resolution, so a
day can end up with fewer than K resolved headlines. The alternative (resolve
first, then rank the survivors) would guarantee K where possible but ranks a
different pool; it is not implemented.
"""

import csv
import datetime as dt
import hashlib
import re
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError

REQUIRED_COLUMNS = ("date", "event_type", "goldstein_scale", "num_articles", "url")

# Raw GDELT v2 export header -> normalized column name.
GDELT_COLUMN_MAP = {
    "SQLDATE": "date",
    "EventCode": "event_type",
    "GoldsteinScale": "goldstein_scale",
    "NumArticles": "num_articles",
    "SOURCEURL": "url",
    "Actor1Name": "actor1",
    "Actor2Name": "actor2",
}

MACRO_CODE_LOW = 100
MACRO_CODE_HIGH = 199
DEFAULT_TOP_K = 100


@dataclass(frozen=True)
class EventRecord:
    date: dt.date
    event_code: int
    goldstein_scale: float
    num_articles: int
    url: str
    actors: tuple = ()


@dataclass(frozen=True)
class HeadlineRecord:
    date: dt.date
    headline: str
    goldstein_scale: float
    url: str


def _parse_date(raw: str) -> dt.date:
    raw = raw.strip()
    if re.fullmatch(r"\d{8}", raw):  # GDELT SQLDATE form
        return dt.date(int(raw[:4]), int(raw[4:6]), int(raw[6:8]))
    return dt.date.fromisoformat(raw)


def _row_to_event(row: dict) -> EventRecord:
    date = _parse_date(row["date"])
    code = int(row["event_type"])
    goldstein = float(row["goldstein_scale"])
    num_articles = int(row["num_articles"])
    url = row["url"].strip()
    if not (0 <= code <= 999):
        raise ValueError(f"event_type {code} outside [0, 999]")
    if not (-10.0 <= goldstein <= 10.0):
        raise ValueError(f"goldstein_scale {goldstein} outside [-10, 10]")
    if num_articles < 0:
        raise ValueError(f"num_articles {num_articles} negative")
    if not url:
        raise ValueError("empty url")
    actors = tuple(
        row[k].strip() for k in ("actor1", "actor2") if row.get(k, "").strip()
    )
    return EventRecord(date, code, goldstein, num_articles, url, actors)


def parse_events(path) -> tuple[list[EventRecord], int]:
    """Parse an event file; malformed rows are skipped and counted, not fatal.

    Returns (events, skipped). Raises DataError for a missing file or a missing
    mandatory column, naming the column.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"event file not found: {path}")
    events: list[EventRecord] = []
    skipped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise DataError(f"event file {path} is missing mandatory column '{col}'")
        for row in reader:
            try:
                events.append(_row_to_event(row))
            except (ValueError, KeyError, TypeError):
                skipped += 1
    return events, skipped


def convert_gdelt_export(src, dest) -> int:
    """Rewrite a raw tab-delimited GDELT export into the normalized event-file form.

    Returns the number of rows written. Unknown raw columns are dropped.
    """
    src, dest = Path(src), Path(dest)
    written = 0
    with src.open(newline="", encoding="utf-8") as fin:
        reader = csv.DictReader(fin, delimiter="\t")
        missing = [c for c in GDELT_COLUMN_MAP if c not in (reader.fieldnames or [])
                   and GDELT_COLUMN_MAP[c] in REQUIRED_COLUMNS]
        if missing:
            raise DataError(f"GDELT export {src} is missing columns {missing}")
        out_fields = [GDELT_COLUMN_MAP[c] for c in reader.fieldnames if c in GDELT_COLUMN_MAP]
        with dest.open("w", newline="", encoding="utf-8") as fout:
            writer = csv.DictWriter(fout, fieldnames=out_fields)
            writer.writeheader()
            for row in reader:
                writer.writerow(
                    {GDELT_COLUMN_MAP[k]: v for k, v in row.items() if k in GDELT_COLUMN_MAP}
                )
                written += 1
    return written


def filter_macro_events(events: list[EventRecord]) -> list[EventRecord]:
    """Keep events whose code falls in the macro-relevant 100-199 block, order preserved."""
    return [e for e in events if MACRO_CODE_LOW <= e.event_code <= MACRO_CODE_HIGH]


def select_top_daily(events: list[EventRecord], k: int = DEFAULT_TOP_K) -> list[EventRecord]:
    """Retain per calendar date the k most-covered events.

    Ranking is by descending num_articles with ties broken by ascending URL, so the
    result is invariant under permutation of the input. Output is ordered by date,
    then by rank.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    by_date: dict[dt.date, list[EventRecord]] = {}
    for e in events:
        by_date.setdefault(e.date, []).append(e)
    out: list[EventRecord] = []
    for date in sorted(by_date):
        day = sorted(by_date[date], key=lambda e: (-e.num_articles, e.url))
        out.extend(day[:k])
    return out


class HeadlineStore:
    """Maps URL -> headline text from a local directory or a two-column file.

    Directory form: one ``<sha256(url)>.txt`` file per URL. File form: comma-separated
    ``url,headline`` with a header row.
    """

    def __init__(self, mapping: dict[str, str], root: Path | None = None):
        self._mapping = mapping
        self._root = root

    @classmethod
    def from_path(cls, path) -> "HeadlineStore":
        path = Path(path)
        if path.is_dir():
            return cls({}, root=path)
        if not path.exists():
            raise DataError(f"headline store not found: {path}")
        mapping: dict[str, str] = {}
        try:
            with path.open(newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                if not reader.fieldnames or "url" not in reader.fieldnames \
                        or "headline" not in reader.fieldnames:
                    raise DataError(
                        f"headline store {path} needs columns 'url' and 'headline'"
                    )
                for row in reader:
                    mapping[row["url"]] = row["headline"]
        except (OSError, csv.Error) as exc:
            raise DataError(f"headline store {path} unreadable: {exc}") from exc
        return cls(mapping)

    def get(self, url: str) -> str | None:
        if self._root is not None:
            name = hashlib.sha256(url.encode("utf-8")).hexdigest() + ".txt"
            candidate = self._root / name
            if not candidate.exists():
                return None
            try:
                return candidate.read_text(encoding="utf-8")
            except OSError as exc:
                raise DataError(f"headline store entry {candidate} unreadable: {exc}") from exc
        return self._mapping.get(url)


def resolve_headlines(
    events: list[EventRecord],
    store: HeadlineStore,
    max_workers: int | None = None,
) -> tuple[list[HeadlineRecord], int]:
    """Join headline text onto events; unresolved or empty headlines are dropped.

    Returns (headlines, dropped) with len(headlines) + dropped == len(events).
    Lookup may run on a thread pool; results are identical to sequential execution.
    """
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            texts = list(pool.map(lambda e: store.get(e.url), events))
    else:
        texts = [store.get(e.url) for e in events]
    headlines: list[HeadlineRecord] = []
    dropped = 0
    for event, text in zip(events, texts):
        text = (text or "").strip()
        if text:
            headlines.append(
                HeadlineRecord(event.date, text, event.goldstein_scale, event.url)
            )
        else:
            dropped += 1
    return headlines, dropped


_TITLE_RE = re.compile(r"<title[^>]*>(.*?)</title>", re.IGNORECASE | re.DOTALL)
_OG_TITLE_RE = re.compile(
    r"<meta[^>]+property=[\"']og:title[\"'][^>]+content=[\"'](.*?)[\"']",
    re.IGNORECASE | re.DOTALL,
)


def extract_title(html: str) -> str:
    """Pull the <title> element, falling back to the og:title meta property."""
    m = _TITLE_RE.search(html)
    if m and m.group(1).strip():
        return re.sub(r"\s+", " ", m.group(1)).strip()
    m = _OG_TITLE_RE.search(html)
    if m:
        return re.sub(r"\s+", " ", m.group(1)).strip()
    return ""


def fetch_headline(url: str, timeout: float = 10.0) -> str:
    """Fetch a URL and extract its title. Network path; not used by the test suite."""
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        charset = resp.headers.get_content_charset() or "utf-8"
        html = resp.read().decode(charset, errors="replace")
    return extract_title(html)


def write_headline_file(path, headlines: list[HeadlineRecord]) -> None:
    """Write the headline file consumed by the scoring stage."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "headline", "goldstein_scale", "url"])
        for h in headlines:
            writer.writerow([h.date.isoformat(), h.headline, repr(h.goldstein_scale), h.url])


def read_headline_file(path) -> list[HeadlineRecord]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"headline file not found: {path}")
    out: list[HeadlineRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for col in ("date", "headline", "goldstein_scale", "url"):
            if col not in (reader.fieldnames or []):
                raise DataError(f"headline file {path} is missing column '{col}'")
        for row in reader:
            out.append(
                HeadlineRecord(
                    _parse_date(row["date"]),
                    row["headline"],
                    float(row["goldstein_scale"]),
                    row["url"],
                )
            )
    return out
