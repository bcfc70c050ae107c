"""Two-level wellness inference.

Daily category fractions are denoised with the seasonal-trend
decomposition, rescaled onto their linguistic-variable universes, pushed
through three base controllers (physical, productive, social), and the
three crisp component scores feed one top controller that emits the
overall wellness percentage.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np

from .dsl import ConfigDoc, parse_config, validate
from .engine import Controller
from .fuzzy import DEFAULT_RESOLUTION
from .ingest import (ActivityLog, CategoryDef, CategorySeries, IngestError,
                     LabelMap, category_series, mood_top_k)
from .stl import decompose_or_mean

logger = logging.getLogger(__name__)

TERMS = ("L", "M", "H")
TERM_RANK = {t: i for i, t in enumerate(TERMS)}

# Hand-specified core of the shipped top-level rule base; the remaining
# input combinations are filled by ordinal completion (see
# complete_rule_base). Keys are (health, productive, social) terms.
CORE_TOP_RULES: dict[tuple[str, str, str], str] = {
    ("L", "L", "L"): "L",
    ("M", "L", "L"): "L",
    ("H", "L", "L"): "L",
    ("M", "M", "L"): "M",
    ("H", "M", "L"): "M",
    ("L", "M", "H"): "M",
    ("H", "M", "H"): "H",
    ("L", "H", "H"): "M",
    ("M", "H", "H"): "H",
    ("H", "H", "H"): "H",
}

COMPONENT_OUTPUTS = ("health", "productive", "social")
OVERALL_OUTPUT = "overall"


class PipelineError(Exception):
    """Configuration or per-user analysis failure."""


class InsufficientCoverageError(PipelineError):
    """No analyzable days survive the coverage threshold."""


def ordinal_consequent(ranks: Sequence[int], n_terms: int = 3) -> int:
    """Term rank nearest to the mean of ``ranks``; exact halves round
    toward the middle rank."""
    mean = sum(ranks) / len(ranks)
    lo = int(np.floor(mean))
    hi = min(lo + 1, n_terms - 1)
    lo = max(lo, 0)
    d_lo, d_hi = mean - lo, hi - mean
    if d_lo < d_hi:
        return lo
    if d_hi < d_lo:
        return hi
    middle = (n_terms - 1) / 2
    return lo if abs(lo - middle) <= abs(hi - middle) else hi


def complete_rule_base(
    explicit: Mapping[tuple[str, ...], str],
    n_inputs: int = 3,
    terms: Sequence[str] = TERMS,
) -> dict[tuple[str, ...], str]:
    """Fill every input-term combination, keeping explicit rows verbatim.

    Missing combinations get the ordinal consequent of their term ranks.
    Explicit rows are never re-derived: they are not a function of the
    rank mean (combinations sharing a mean can carry different
    consequents), so overwriting them would change authored behavior.
    """
    rank = {t: i for i, t in enumerate(terms)}
    for combo, cons in explicit.items():
        if len(combo) != n_inputs or any(t not in rank for t in combo):
            raise ValueError(f"explicit rule {combo} does not match the "
                             f"term set {tuple(terms)}")
        if cons not in rank:
            raise ValueError(f"explicit consequent {cons!r} is not a term")
    table: dict[tuple[str, ...], str] = {}
    for combo in itertools.product(terms, repeat=n_inputs):
        if combo in explicit:
            table[combo] = explicit[combo]
        else:
            idx = ordinal_consequent([rank[t] for t in combo], len(terms))
            table[combo] = terms[idx]
    return table


def is_monotone_table(table: Mapping[tuple[str, ...], str],
                      terms: Sequence[str] = TERMS) -> bool:
    """True when componentwise-larger inputs never map to a lower term."""
    rank = {t: i for i, t in enumerate(terms)}
    combos = list(table)
    for a in combos:
        for b in combos:
            if all(rank[x] <= rank[y] for x, y in zip(a, b)):
                if rank[table[a]] > rank[table[b]]:
                    return False
    return True


@dataclass(frozen=True)
class ComponentScores:
    health: float
    productive: float
    social: float

    def as_dict(self) -> dict[str, float]:
        return {"health": self.health, "productive": self.productive,
                "social": self.social}


@dataclass(frozen=True)
class WellnessReport:
    uuid: str
    total: float
    components: ComponentScores
    moods: tuple[str, ...]
    window: tuple[int, int]  # inclusive day indices


@dataclass(frozen=True)
class StlParams:
    period: int = 7
    inner_iters: int = 2
    outer_iters: int = 1
    seasonal_window: int = 7
    trend_window: int | None = None

    def kwargs(self) -> dict:
        return {"inner_iters": self.inner_iters,
                "outer_iters": self.outer_iters,
                "seasonal_window": self.seasonal_window,
                "trend_window": self.trend_window}


def load_label_map(path: str) -> LabelMap:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise IngestError(f"cannot read label map {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise IngestError(f"{path}: invalid JSON ({exc})") from None
    cats = []
    try:
        for entry in raw["categories"]:
            cats.append(CategoryDef(
                name=entry["name"],
                component=entry["component"],
                labels=tuple(entry["labels"]),
                saturation=float(entry["saturation"]),
            ))
    except (KeyError, TypeError) as exc:
        raise IngestError(f"{path}: malformed label map ({exc})") from None
    for cat in cats:
        if not 0.0 < cat.saturation <= 1.0:
            raise IngestError(f"{path}: category '{cat.name}' saturation must "
                              f"be in (0, 1], got {cat.saturation}")
    return LabelMap(tuple(cats))


def default_config_text() -> str:
    return resources.files("fuzzwell").joinpath(
        "data/wellness-default.fzc").read_text(encoding="utf-8")


def default_label_map() -> LabelMap:
    path = resources.files("fuzzwell").joinpath("data/wellness-default-labels.json")
    with resources.as_file(path) as p:
        return load_label_map(str(p))


def verify_default_top_rules(doc: ConfigDoc) -> None:
    """Startup consistency gate for the shipped config: its top-level rule
    base must equal the ordinal completion of the hand-specified core and
    stay ordinally monotone."""
    ctrl = next((c for c in doc.controllers if c.output == OVERALL_OUTPUT), None)
    if ctrl is None:
        raise PipelineError("default config lacks a controller whose output "
                            f"is '{OVERALL_OUTPUT}'")
    shipped = {tuple(t for _, t in r.antecedents): r.consequent[1]
               for r in ctrl.rules}
    expected = complete_rule_base(CORE_TOP_RULES)
    if shipped != expected:
        raise PipelineError("default top-level rule base does not match the "
                            "ordinal completion of its core rules")
    if not is_monotone_table(expected):
        raise PipelineError("completed top-level rule base is not monotone")


class WellnessPipeline:
    """Bound configuration: variables, four controllers, label map."""

    def __init__(self, doc: ConfigDoc, label_map: LabelMap,
                 resolution: int = DEFAULT_RESOLUTION,
                 coverage_min: float = 0.1,
                 stl_params: StlParams | None = None):
        errors = [d for d in validate(doc, resolution) if d.severity == "error"]
        if errors:
            listing = "; ".join(str(d) for d in errors)
            raise PipelineError(f"configuration is invalid: {listing}")
        self.doc = doc
        self.label_map = label_map
        self.coverage_min = coverage_min
        self.stl_params = stl_params or StlParams()
        self.variables = {v.name: v for v in doc.variables}
        variables = self.variables

        by_output = {c.output: c for c in doc.controllers}
        missing = [o for o in (*COMPONENT_OUTPUTS, OVERALL_OUTPUT)
                   if o not in by_output]
        if missing:
            raise PipelineError("config must declare controllers whose outputs "
                                f"are {missing} (missing)")
        for name in (*COMPONENT_OUTPUTS, OVERALL_OUTPUT):
            var = variables[name]
            if var.lo < 0.0 or var.hi > 100.0:
                raise PipelineError(
                    f"score variable '{name}' must live within [0, 100], "
                    f"got [{var.lo}, {var.hi}]; reports are percentages")
        self.base_controllers = {
            out: Controller(by_output[out], variables, resolution)
            for out in COMPONENT_OUTPUTS
        }
        self.top_controller = Controller(by_output[OVERALL_OUTPUT], variables,
                                         resolution)
        if set(self.top_controller.spec.inputs) != set(COMPONENT_OUTPUTS):
            raise PipelineError("top-level controller must take exactly "
                                f"{COMPONENT_OUTPUTS} as inputs")

        categories = {c.name: c for c in label_map.categories}
        self.category_variables: dict[str, CategoryDef] = {}
        for ctrl in self.base_controllers.values():
            for name in ctrl.spec.inputs:
                if name not in categories:
                    raise PipelineError(
                        f"controller '{ctrl.name}' input '{name}' has no "
                        f"category in the label map")
                self.category_variables[name] = categories[name]

    def controller_inputs(self, cs: CategorySeries,
                          window: tuple[int, int] | None = None,
                          ) -> dict[str, float]:
        """Crisp per-category inputs: mean of the denoised daily-fraction
        trend over the window, rescaled onto the category's universe."""
        w0, w1 = self.clip_window(cs, window)
        sl = slice(w0 - cs.start_day, w1 - cs.start_day + 1)
        included = cs.included[sl]
        if not included.any():
            raise InsufficientCoverageError(
                f"no day in [{w0}, {w1}] reaches coverage "
                f">= {self.coverage_min}")
        idx = np.arange(int(included.shape[0]), dtype=np.float64)
        inputs: dict[str, float] = {}
        for name, cat in self.category_variables.items():
            var = self.variables[name]
            frac = cs.fractions[name][sl]
            if included.all():
                filled = frac
            else:
                filled = np.interp(idx, idx[included], frac[included])
            dec = decompose_or_mean(filled, self.stl_params.period,
                                    **self.stl_params.kwargs())
            level = float(dec.trend.mean())
            inputs[name] = var.lo + (level / cat.saturation) * (var.hi - var.lo)
        return inputs

    def base_scores(self, inputs: Mapping[str, float]) -> ComponentScores:
        """Run the three base controllers on their category inputs."""
        values: dict[str, float] = {}
        for out, ctrl in self.base_controllers.items():
            sub = {name: inputs[name] for name in ctrl.spec.inputs}
            values[out] = ctrl.evaluate(sub)
        return ComponentScores(**values)

    def overall_score(self, scores: ComponentScores) -> float:
        return self.top_controller.evaluate(scores.as_dict())

    def analyze_user(self, log: ActivityLog,
                     window: tuple[int, int] | None = None) -> WellnessReport:
        """Full per-user run: ingest reduction, trend inputs, both
        inference levels, top mood labels."""
        try:
            cs = category_series(log, self.label_map, self.coverage_min)
            w = self.clip_window(cs, window)
            inputs = self.controller_inputs(cs, w)
            scores = self.base_scores(inputs)
            total = self.overall_score(scores)
        except (IngestError, PipelineError, ValueError) as exc:
            raise PipelineError(f"user {log.uuid}: {exc}") from exc
        return WellnessReport(
            uuid=log.uuid,
            total=total,
            components=scores,
            moods=tuple(mood_top_k(log, 3)),
            window=w,
        )

    def clip_window(self, cs: CategorySeries,
                     window: tuple[int, int] | None) -> tuple[int, int]:
        w0 = cs.start_day if window is None or window[0] is None else int(window[0])
        w1 = cs.end_day if window is None or window[1] is None else int(window[1])
        w0 = max(w0, cs.start_day)
        w1 = min(w1, cs.end_day)
        if w0 > w1:
            raise InsufficientCoverageError(
                f"analysis window [{w0}, {w1}] contains no logged days")
        return w0, w1


def build_pipeline(config_text: str | None = None,
                   label_map: LabelMap | None = None,
                   resolution: int = DEFAULT_RESOLUTION,
                   coverage_min: float = 0.1,
                   stl_params: StlParams | None = None) -> WellnessPipeline:
    """Assemble a pipeline; with no arguments, uses the shipped defaults.

    The shipped default config passes the top-rule completion gate before
    anything runs.
    """
    if config_text is None:
        doc = parse_config(default_config_text())
        verify_default_top_rules(doc)
    else:
        doc = parse_config(config_text)
    lm = label_map if label_map is not None else default_label_map()
    return WellnessPipeline(doc, lm, resolution=resolution,
                            coverage_min=coverage_min, stl_params=stl_params)
