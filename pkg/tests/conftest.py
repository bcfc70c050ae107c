"""Shared fixtures: synthetic user logs and independent numeric oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fuzzwell.ingest import ActivityLog, save_user_log

CATEGORY_LABELS = {
    "sleep": ("SLEEPING", "LYING_DOWN"),
    "diet": ("EATING", "RESTAURANT"),
    "exercise": ("WALKING", "RUNNING"),
    "work": ("LOC_main_workplace", "IN_CLASS"),
    "leisure": ("WATCHING_TV", "SHOPPING"),
    "interaction": ("TALKING", "WITH_FRIENDS"),
    "online": ("SURFING_THE_INTERNET", "PHONE_IN_HAND"),
}

# Daily target fractions of *reported* minutes per category, plus mood
# label rates. Values are chosen so the scaled inputs land where each
# persona's story says they should (see the label-map saturations).
PERSONAS = {
    "ideal": {
        "targets": {"sleep": 1 / 3, "diet": 0.105, "exercise": 0.07,
                    "work": 0.35, "leisure": 0.105, "interaction": 0.22,
                    "online": 0.12},
        "moods": {"HAPPY": 0.06, "ATTENTIVE": 0.04, "CALM": 0.02},
    },
    "isolated": {
        "targets": {"sleep": 0.29, "diet": 0.06, "exercise": 0.035,
                    "work": 0.18, "leisure": 0.05, "interaction": 0.004,
                    "online": 0.008},
        "moods": {"STRESSED": 0.05, "TIRED": 0.03, "SLEEPY": 0.02},
    },
    "typical": {
        "targets": {"sleep": 0.30, "diet": 0.07, "exercise": 0.045,
                    "work": 0.24, "leisure": 0.07, "interaction": 0.10,
                    "online": 0.10},
        "moods": {"CALM": 0.04, "TIRED": 0.03, "ACTIVE": 0.02},
    },
}

ALL_LABELS = tuple(l for pair in CATEGORY_LABELS.values() for l in pair) + (
    "HAPPY", "ATTENTIVE", "CALM", "STRESSED", "TIRED", "SLEEPY", "ACTIVE")

START_DAY = 19723  # an arbitrary epoch day; fixtures span [START_DAY, ...)


def synth_log(uuid: str, persona: str = "typical", days: int = 28,
              seed: int = 0, stride_minutes: int = 4,
              weekly_amplitude: float = 0.25,
              report_start_min: int = 360) -> ActivityLog:
    """Deterministic synthetic activity log.

    Rows cover 06:00-24:00 at ``stride_minutes`` spacing; each row is one
    reported minute, so daily coverage is about 0.19 with the defaults.
    Category activity is spread uniformly over a day's rows with an exact
    per-day count, a weekly sinusoid and a little noise; moods are
    sprinkled at persona-specific rates.
    """
    cfg = PERSONAS[persona]
    rng = np.random.default_rng(seed)
    minutes = np.arange(report_start_min, 1440, stride_minutes)
    rows_per_day = minutes.shape[0]
    n = rows_per_day * days
    label_index = {name: i for i, name in enumerate(ALL_LABELS)}
    states = np.zeros((n, len(ALL_LABELS)), dtype=np.int8)
    timestamps = np.empty(n, dtype=np.int64)

    for d in range(days):
        sl = slice(d * rows_per_day, (d + 1) * rows_per_day)
        timestamps[sl] = (START_DAY + d) * 86400 + minutes * 60
        season = 1.0 + weekly_amplitude * math.sin(2 * math.pi * d / 7)
        for cat, target in cfg["targets"].items():
            frac = target * season * (1.0 + rng.normal(0, 0.05))
            count = int(round(np.clip(frac, 0.0, 0.95) * rows_per_day))
            picks = rng.permutation(rows_per_day)[:count]
            primary, secondary = CATEGORY_LABELS[cat]
            which = rng.random(count) < 0.8
            states[sl][picks[which], label_index[primary]] = 1
            states[sl][picks[~which], label_index[secondary]] = 1
        for mood, rate in cfg["moods"].items():
            count = int(round(rate * rows_per_day))
            picks = rng.permutation(rows_per_day)[:count]
            states[sl][picks, label_index[mood]] = 1

    # Sparse missingness on otherwise-false cells: a tenth of the cells
    # carry no report at all, exercising the three-valued contract.
    missing = rng.random(states.shape) < 0.1
    states[missing & (states == 0)] = -1
    return ActivityLog(uuid, timestamps, ALL_LABELS, states)


def write_user(dirpath, uuid: str, persona: str = "typical", days: int = 28,
               seed: int = 0, **kwargs) -> str:
    path = str(dirpath / f"{uuid}.labels.csv")
    save_user_log(synth_log(uuid, persona, days, seed, **kwargs), path)
    return path


@pytest.fixture(scope="session")
def sixty_user_dir(tmp_path_factory):
    """60 synthetic users, 28 days each, deterministic content."""
    root = tmp_path_factory.mktemp("users60")
    personas = ("ideal", "isolated") + ("typical",) * 58
    for i, persona in enumerate(personas):
        uuid = f"{i:08X}-AAAA-4BBB-8CCC-{i:012X}"
        write_user(root, uuid, persona, days=28, seed=1000 + i)
    return root


@pytest.fixture(scope="session")
def small_user_dir(tmp_path_factory):
    """Three users for quick CLI-level tests."""
    root = tmp_path_factory.mktemp("users3")
    for i, persona in enumerate(("ideal", "isolated", "typical")):
        uuid = f"{i:08X}-0000-4000-8000-{i:012X}"
        write_user(root, uuid, persona, days=21, seed=i)
    return root


def fine_grid_quotient(fset, refine: int = 10) -> float:
    """Independent centroid oracle: resample the piecewise-linear sampled
    set on a ``refine``-times finer grid and take the Riemann quotient
    with exact (fsum) accumulation."""
    xs = fset.universe.grid()
    fine_n = (xs.shape[0] - 1) * refine + 1
    fx = np.linspace(xs[0], xs[-1], fine_n)
    fy = np.interp(fx, xs, fset.degrees)
    num = math.fsum((fx * fy).tolist())
    den = math.fsum(fy.tolist())
    return num / den
