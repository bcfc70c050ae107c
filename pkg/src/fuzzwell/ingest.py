"""Loading per-user activity-label logs and reducing them to daily series.

A log is a CSV (optionally gzipped) with a unix-seconds ``timestamp``
column and any number of ``label:``-prefixed columns whose cells are
1 (reported true), 0 (reported false) or empty (missing). The filename
stem before the first dot is the user's UUID. Each row counts as one
minute of reporting.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

MINUTES_PER_DAY = 1440
SECONDS_PER_DAY = 86400

# Fixed vocabulary of self-reported mood labels used for report rows.
MOOD_LABELS = frozenset({
    "ACTIVE", "ATTENTIVE", "CALM", "DREAMY", "HAPPY", "HUNGRY",
    "SLEEPY", "STRESSED", "TIRED",
})

STATE_MISSING = -1
STATE_FALSE = 0
STATE_TRUE = 1


class IngestError(Exception):
    """Unusable log file or label-map configuration."""


@dataclass(frozen=True)
class ActivityLog:
    """Per-user observations: one row per reported minute.

    ``states`` is an (n_rows, n_labels) int8 matrix over
    {-1 missing, 0 reported-false, 1 reported-true}; timestamps are
    strictly increasing unix seconds.
    """

    uuid: str
    timestamps: np.ndarray
    labels: tuple[str, ...]
    states: np.ndarray

    @property
    def n_rows(self) -> int:
        return int(self.timestamps.shape[0])

    def label_states(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]


@dataclass(frozen=True)
class CategoryDef:
    name: str
    component: str
    labels: tuple[str, ...]
    saturation: float  # daily fraction mapping to the top of the variable universe


@dataclass(frozen=True)
class LabelMap:
    categories: tuple[CategoryDef, ...]

    def __post_init__(self) -> None:
        per_component: dict[str, set[str]] = {}
        for cat in self.categories:
            seen = per_component.setdefault(cat.component, set())
            dup = seen.intersection(cat.labels)
            if dup:
                raise IngestError(
                    f"label(s) {sorted(dup)} mapped to two categories of "
                    f"component '{cat.component}'")
            seen.update(cat.labels)

    def category(self, name: str) -> CategoryDef:
        for cat in self.categories:
            if cat.name == name:
                return cat
        raise KeyError(f"no category '{name}'")

    @property
    def category_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories)


@dataclass(frozen=True)
class CategorySeries:
    """Daily per-category activity fractions plus reporting coverage.

    ``fractions[cat][d]`` is (minutes with any mapped label reported true)
    / (minutes with any report) on day ``start_day + d``. ``coverage`` is
    the fraction of the day's minutes having any report; days below the
    coverage threshold are excluded from analysis.
    """

    start_day: int
    fractions: dict[str, np.ndarray]
    coverage: np.ndarray
    included: np.ndarray

    @property
    def n_days(self) -> int:
        return int(self.coverage.shape[0])

    @property
    def end_day(self) -> int:
        return self.start_day + self.n_days - 1


def _uuid_from_path(path: str) -> str:
    stem = os.path.basename(path).split(".", 1)[0]
    if not stem:
        raise IngestError(f"cannot derive a UUID from filename {path!r}")
    return stem


def load_user_log(path: str) -> ActivityLog:
    """Parse one user's label CSV (gzip detected from the extension)."""
    uuid = _uuid_from_path(path)
    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise IngestError(f"{path}: file is empty") from None
    except FileNotFoundError:
        raise IngestError(f"{path}: no such file") from None
    if df.shape[0] == 0:
        raise IngestError(f"{path}: no data rows")
    if "timestamp" not in df.columns:
        raise IngestError(f"{path}: missing 'timestamp' column")

    ts = pd.to_numeric(df["timestamp"], errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(ts))
    if bad.size:
        # +2: header line plus 1-based numbering.
        raise IngestError(f"{path}: line {bad[0] + 2}: unparseable timestamp "
                          f"{df['timestamp'].iloc[bad[0]]!r}")
    timestamps = ts.astype(np.int64)

    label_cols = [c for c in df.columns if c.startswith("label:")]
    labels = tuple(c[len("label:"):] for c in label_cols)
    states = np.empty((df.shape[0], len(label_cols)), dtype=np.int8)
    for j, col in enumerate(label_cols):
        raw = df[col]
        vals = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=np.float64)
        nan = np.isnan(vals)
        junk = np.flatnonzero(nan & raw.notna().to_numpy())
        if junk.size:
            raise IngestError(f"{path}: line {junk[0] + 2}: unparseable cell "
                              f"{raw.iloc[junk[0]]!r} in column {col!r}")
        invalid = np.flatnonzero(~nan & (vals != 0.0) & (vals != 1.0))
        if invalid.size:
            raise IngestError(f"{path}: line {invalid[0] + 2}: cell value "
                              f"{vals[invalid[0]]!r} in column {col!r} is not "
                              f"0, 1 or empty")
        states[:, j] = np.where(nan, STATE_MISSING, vals).astype(np.int8)

    order = np.argsort(timestamps, kind="stable")
    timestamps = timestamps[order]
    states = states[order]
    keep = np.ones(timestamps.shape[0], dtype=bool)
    keep[1:] = timestamps[1:] != timestamps[:-1]
    if not keep.all():
        logger.warning("%s: dropped %d duplicate-timestamp rows",
                       path, int((~keep).sum()))
        timestamps = timestamps[keep]
        states = states[keep]
    return ActivityLog(uuid, timestamps, labels, states)


def save_user_log(log: ActivityLog, path: str) -> None:
    """Write a log back out in the same CSV layout load_user_log reads."""
    data: dict[str, object] = {"timestamp": log.timestamps}
    for j, label in enumerate(log.labels):
        col = pd.Series(log.states[:, j], dtype="Int8")
        data[f"label:{label}"] = col.mask(col == STATE_MISSING)
    pd.DataFrame(data).to_csv(path, index=False, lineterminator="\n")


def category_series(log: ActivityLog, label_map: LabelMap,
                    coverage_min: float = 0.1) -> CategorySeries:
    """Reduce a log to contiguous daily fraction series per category.

    Fractions are normalized by minutes actually reported that day (not by
    wall-clock minutes): sparse self-reporting should lower confidence,
    not fake inactivity. Categories may co-occur, so fractions need not
    sum to 1 across categories.
    """
    if log.n_rows == 0:
        raise IngestError(f"{log.uuid}: log has no rows")
    days = log.timestamps // SECONDS_PER_DAY
    start_day = int(days[0])
    day_idx = (days - start_day).astype(np.int64)
    n_days = int(day_idx[-1]) + 1

    reported = (log.states != STATE_MISSING).any(axis=1)
    minutes = np.bincount(day_idx[reported], minlength=n_days).astype(np.float64)
    coverage = np.minimum(minutes / MINUTES_PER_DAY, 1.0)

    label_index = {name: i for i, name in enumerate(log.labels)}
    fractions: dict[str, np.ndarray] = {}
    for cat in label_map.categories:
        cols = [label_index[l] for l in cat.labels if l in label_index]
        if cols:
            active = (log.states[:, cols] == STATE_TRUE).any(axis=1)
            counts = np.bincount(day_idx[active], minlength=n_days).astype(np.float64)
        else:
            counts = np.zeros(n_days)
        frac = np.divide(counts, minutes, out=np.zeros(n_days),
                         where=minutes > 0)
        fractions[cat.name] = np.clip(frac, 0.0, 1.0)

    included = coverage >= coverage_min
    return CategorySeries(start_day, fractions, coverage, included)


def mood_top_k(log: ActivityLog, k: int) -> list[str]:
    """The k most-reported mood labels, ties broken alphabetically."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    counts: list[tuple[int, str]] = []
    for j, label in enumerate(log.labels):
        if label in MOOD_LABELS:
            c = int((log.states[:, j] == STATE_TRUE).sum())
            if c > 0:
                counts.append((-c, label))
    counts.sort()
    return [label for _, label in counts[:k]]
