"""Fuzzy set representation and numerics.

Piecewise-linear membership functions over real interval universes,
min/max norms, activation clipping, max-aggregation and centroid
defuzzification. Everything is immutable and pure; the discretized
operations run on uniform sample grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._backend import centroid_moments, clip_accumulate, mf_grid

SHAPE_TRI = 0
SHAPE_TRAP = 1
SHAPE_CRISP = 2

_SHAPE_NAMES = {SHAPE_TRI: "tri", SHAPE_TRAP: "trap", SHAPE_CRISP: "crisp"}
_SHAPE_ARITY = {SHAPE_TRI: 3, SHAPE_TRAP: 4, SHAPE_CRISP: 2}

DEFAULT_RESOLUTION = 1001


class FuzzyError(Exception):
    """Base class for fuzzy-core contract violations."""


class EmptyAggregateError(FuzzyError):
    """Raised when an all-zero fuzzy set is defuzzified (no rule fired)."""


@dataclass(frozen=True)
class Universe:
    """Closed real interval [lo, hi] with a uniform sample resolution."""

    lo: float
    hi: float
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise FuzzyError(f"universe lo ({self.lo}) must be < hi ({self.hi})")
        if self.resolution < 2:
            raise FuzzyError(f"resolution must be >= 2, got {self.resolution}")

    def grid(self) -> np.ndarray:
        """Sample points x_i = lo + i*(hi-lo)/(resolution-1), read-only."""
        return _grid(self.lo, self.hi, self.resolution)


@lru_cache(maxsize=256)
def _grid(lo: float, hi: float, resolution: int) -> np.ndarray:
    xs = np.linspace(lo, hi, resolution)
    xs.flags.writeable = False
    return xs


@dataclass(frozen=True)
class MembershipFunction:
    """Piecewise-linear membership shape: triangular, trapezoidal or crisp.

    Triangular and trapezoidal shapes are normal (degree 1 is attained);
    the crisp shape is the indicator of [a, b].
    """

    kind: int
    points: tuple[float, ...]

    def __post_init__(self) -> None:
        arity = _SHAPE_ARITY.get(self.kind)
        if arity is None:
            raise FuzzyError(f"unknown shape kind {self.kind}")
        if len(self.points) != arity:
            raise FuzzyError(
                f"{_SHAPE_NAMES[self.kind]} expects {arity} breakpoints, "
                f"got {len(self.points)}")
        if any(b < a for a, b in zip(self.points, self.points[1:])):
            raise FuzzyError(
                f"{_SHAPE_NAMES[self.kind]} breakpoints must be "
                f"non-decreasing, got {self.points}")

    @property
    def shape_name(self) -> str:
        return _SHAPE_NAMES[self.kind]

    @property
    def support(self) -> tuple[float, float]:
        return self.points[0], self.points[-1]

    def __call__(self, x: float) -> float:
        return mf_eval(self, x)

    def sample(self, universe: Universe) -> np.ndarray:
        """Degrees of this shape at every grid point of ``universe``."""
        p = self.points + (0.0,) * (4 - len(self.points))
        return mf_grid(self.kind, p[0], p[1], p[2], p[3], universe.grid())


def triangular(a: float, b: float, c: float) -> MembershipFunction:
    return MembershipFunction(SHAPE_TRI, (float(a), float(b), float(c)))


def trapezoidal(a: float, b: float, c: float, d: float) -> MembershipFunction:
    return MembershipFunction(SHAPE_TRAP, (float(a), float(b), float(c), float(d)))


def crisp(a: float, b: float) -> MembershipFunction:
    return MembershipFunction(SHAPE_CRISP, (float(a), float(b)))


def mf_eval(mf: MembershipFunction, x: float) -> float:
    """Degree of belonging of ``x``, in [0, 1]; 0 outside the support."""
    p = mf.points
    if mf.kind == SHAPE_TRI:
        a, b, c = p
        if x < a or x > c:
            return 0.0
        if x <= b:
            return (x - a) / (b - a) if b > a else 1.0
        return (c - x) / (c - b)
    if mf.kind == SHAPE_TRAP:
        a, b, c, d = p
        if x < a or x > d:
            return 0.0
        if x < b:
            return (x - a) / (b - a)
        if x <= c:
            return 1.0
        return (d - x) / (d - c)
    a, b = p
    return 1.0 if a <= x <= b else 0.0


@dataclass(frozen=True)
class SampledFuzzySet:
    """Fuzzy set discretized on a universe grid; degrees are read-only."""

    universe: Universe
    degrees: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        d = np.asarray(self.degrees, dtype=np.float64)
        if d.shape != (self.universe.resolution,):
            raise FuzzyError(
                f"degrees length {d.shape} does not match resolution "
                f"{self.universe.resolution}")
        if d.min() < 0.0 or d.max() > 1.0:
            raise FuzzyError("degrees must lie in [0, 1]")
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "degrees", d)


def _check_degree(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise FuzzyError(f"{name} must lie in [0, 1], got {value}")


def t_norm_min(a: float, b: float) -> float:
    """Fuzzy conjunction: min."""
    _check_degree(a, "a")
    _check_degree(b, "b")
    return a if a <= b else b


def s_norm_max(a: float, b: float) -> float:
    """Fuzzy disjunction: max."""
    _check_degree(a, "a")
    _check_degree(b, "b")
    return a if a >= b else b


def clip(mf: MembershipFunction, alpha: float, universe: Universe) -> SampledFuzzySet:
    """Sample ``mf`` on the universe grid and cap every degree at ``alpha``."""
    _check_degree(alpha, "alpha")
    degrees = np.minimum(mf.sample(universe), alpha)
    np.clip(degrees, 0.0, 1.0, out=degrees)
    return SampledFuzzySet(universe, degrees)


def aggregate_max(sets: list[SampledFuzzySet]) -> SampledFuzzySet:
    """Pointwise maximum of sampled sets sharing one universe."""
    if not sets:
        raise FuzzyError("cannot aggregate an empty list of sets")
    universe = sets[0].universe
    acc = sets[0].degrees.copy()
    for s in sets[1:]:
        if s.universe != universe:
            raise FuzzyError(
                f"universe mismatch: {s.universe} vs {universe}")
        clip_accumulate(acc, s.degrees, 1.0)
    np.clip(acc, 0.0, 1.0, out=acc)
    return SampledFuzzySet(universe, acc)


def defuzzify_centroid(fset: SampledFuzzySet) -> float:
    """Center of gravity of a sampled set: sum(x_i*d_i) / sum(d_i).

    Raises EmptyAggregateError on an all-zero set; silently inventing a
    value there would fabricate a score downstream.
    """
    m1, m0 = centroid_moments(fset.universe.grid(), fset.degrees)
    if m0 <= 0.0:
        raise EmptyAggregateError(
            "cannot defuzzify an all-zero set (no rule fired)")
    return m1 / m0
