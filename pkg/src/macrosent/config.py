"""Flat key-value run configuration; every CLI flag has a config counterpart."""

from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import DataError
from .models.tuning import DEFAULT_C_GRID, GbtGrid


@dataclass
class RunConfig:
    events: str = ""
    headline_store: str = ""
    scores: str = ""            # external score file; empty -> built-in lexicon scorer
    prices: str = ""
    out: str = "out"
    asset: str = "ASSET"
    model: str = "gbt"          # "gbt" | "logistic"
    cost_rate: float = 0.0002
    k_splits: int = 5
    seed: int = 0
    warm_up: int = 20
    top_k: int = 100
    pool_weekend: bool = True
    n_boot: int = 1000
    block: int = 20
    ci_level: float = 0.95
    c_grid: tuple = DEFAULT_C_GRID
    gbt_depths: tuple = (2, 3, 4)
    gbt_learning_rates: tuple = (0.05, 0.1)
    gbt_lambda: tuple = (1.0,)
    gbt_alpha: tuple = (0.0,)
    gbt_min_child_weight: tuple = (1.0,)
    gbt_rounds: int = 500
    gbt_early_stop: int = 50
    internal_splits: int = 5

    def validate(self) -> None:
        if self.cost_rate < 0:
            raise DataError(f"cost_rate must be >= 0, got {self.cost_rate}")
        if self.k_splits < 2:
            raise DataError(f"k_splits must be >= 2, got {self.k_splits}")
        if self.model not in ("gbt", "logistic"):
            raise DataError(f"model must be 'gbt' or 'logistic', got {self.model!r}")
        if self.warm_up < 0:
            raise DataError(f"warm_up must be >= 0, got {self.warm_up}")

    def gbt_grid(self) -> GbtGrid:
        return GbtGrid(
            max_depth=tuple(int(v) for v in self.gbt_depths),
            learning_rate=tuple(float(v) for v in self.gbt_learning_rates),
            reg_lambda=tuple(float(v) for v in self.gbt_lambda),
            reg_alpha=tuple(float(v) for v in self.gbt_alpha),
            min_child_weight=tuple(float(v) for v in self.gbt_min_child_weight),
            n_rounds=self.gbt_rounds,
            early_stop_rounds=self.gbt_early_stop,
        )


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_value(raw: str, kind):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise DataError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is tuple:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    return raw


def load_config(path) -> RunConfig:
    """Parse `key = value` lines; '#' starts a comment, lists are comma-separated."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    cfg = RunConfig()
    kinds = {f.name: type(getattr(cfg, f.name)) for f in fields(cfg)}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"config {path} line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in kinds:
            raise DataError(f"config {path} line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _parse_value(raw, kinds[key]))
        except (ValueError, DataError) as exc:
            raise DataError(f"config {path} line {lineno}: {exc}") from exc
    cfg.validate()
    return cfg


def save_config(cfg: RunConfig, path) -> None:
    """Write the resolved configuration; reloading it reproduces the run."""
    lines = []
    for f in sorted(fields(cfg), key=lambda f: f.name):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, tuple):
            rendered = ",".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
