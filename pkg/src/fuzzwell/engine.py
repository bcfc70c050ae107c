"""Mamdani controller execution.

One evaluation runs the classical pipeline: fuzzify crisp inputs, fire
each rule with min-conjunction, clip the consequent term at the rule
activation, aggregate all clipped consequents with max, and defuzzify the
aggregate with the centroid. Implication is clipping (min), matching the
min/max norm pair.
"""

from __future__ import annotations

import logging
from typing import Mapping

import numpy as np

from ._backend import clip_accumulate
from .dsl import ControllerSpec, RuleDecl, VariableDecl
from .fuzzy import (DEFAULT_RESOLUTION, EmptyAggregateError, SampledFuzzySet,
                    Universe, defuzzify_centroid, mf_eval)

logger = logging.getLogger(__name__)


class EngineError(Exception):
    """Controller construction or evaluation contract violation."""


def fuzzify(variable: VariableDecl, x: float) -> dict[str, float]:
    """Degrees of every term of ``variable`` at crisp ``x``.

    Out-of-universe inputs are clamped to [lo, hi] with a logged warning;
    upstream trend extraction can overshoot the nominal range slightly and
    hard failure there would be wrong.
    """
    if x < variable.lo or x > variable.hi:
        clamped = min(max(x, variable.lo), variable.hi)
        logger.warning("input %s=%.6g outside universe [%g, %g]; clamped to %.6g",
                       variable.name, x, variable.lo, variable.hi, clamped)
        x = clamped
    return {t.name: mf_eval(t.mf, x) for t in variable.terms}


def fire_rule(rule: RuleDecl, fuzzified: Mapping[str, Mapping[str, float]]) -> float:
    """Rule activation: min over the degrees of its antecedent terms."""
    activation = 1.0
    for var, term in rule.antecedents:
        if var not in fuzzified:
            raise EngineError(f"rule references variable '{var}' missing "
                              f"from the fuzzified inputs")
        degrees = fuzzified[var]
        if term not in degrees:
            raise EngineError(f"rule references term '{term}' missing from "
                              f"variable '{var}'")
        d = degrees[term]
        if d < activation:
            activation = d
    return activation


class Controller:
    """Executable form of a ControllerSpec bound to its variable declarations.

    Precomputes the output grid and the sampled consequent terms so that
    repeated evaluations only clip and accumulate.
    """

    def __init__(self, spec: ControllerSpec,
                 variables: Mapping[str, VariableDecl],
                 resolution: int = DEFAULT_RESOLUTION):
        self.spec = spec
        try:
            self.input_vars = {name: variables[name] for name in spec.inputs}
            out_var = variables[spec.output]
        except KeyError as exc:
            raise EngineError(f"controller '{spec.name}' references "
                              f"undeclared variable {exc}") from None
        self.output_var = out_var
        self.output_universe = Universe(out_var.lo, out_var.hi, resolution)
        self._consequents = {
            t.name: t.mf.sample(self.output_universe) for t in out_var.terms
        }
        for i, rule in enumerate(spec.rules):
            _, out_term = rule.consequent
            if out_term not in self._consequents:
                raise EngineError(f"rule {i} of controller '{spec.name}' uses "
                                  f"undeclared output term '{out_term}'")

    @property
    def name(self) -> str:
        return self.spec.name

    def fuzzify_inputs(self, inputs: Mapping[str, float]) -> dict[str, dict[str, float]]:
        missing = set(self.input_vars) - set(inputs)
        if missing:
            raise EngineError(f"controller '{self.name}' missing crisp inputs "
                              f"for: {', '.join(sorted(missing))}")
        return {name: fuzzify(var, float(inputs[name]))
                for name, var in self.input_vars.items()}

    def infer(self, inputs: Mapping[str, float]) -> SampledFuzzySet:
        """Aggregated output set: max over activation-clipped consequents.

        Rules with activation 0 are skipped; they contribute all-zero sets
        and only cost time.
        """
        fuzzified = self.fuzzify_inputs(inputs)
        acc = np.zeros(self.output_universe.resolution)
        fired = False
        for rule in self.spec.rules:
            activation = fire_rule(rule, fuzzified)
            if activation <= 0.0:
                continue
            fired = True
            clip_accumulate(acc, self._consequents[rule.consequent[1]], activation)
        if not fired:
            raise EmptyAggregateError(
                f"no rule fired in controller '{self.name}' for inputs "
                f"{dict(inputs)}")
        np.clip(acc, 0.0, 1.0, out=acc)
        return SampledFuzzySet(self.output_universe, acc)

    def evaluate(self, inputs: Mapping[str, float]) -> float:
        """Crisp output: centroid of the aggregated set."""
        return defuzzify_centroid(self.infer(inputs))


def infer(spec: ControllerSpec, variables: Mapping[str, VariableDecl],
          inputs: Mapping[str, float],
          resolution: int = DEFAULT_RESOLUTION) -> SampledFuzzySet:
    return Controller(spec, variables, resolution).infer(inputs)


def evaluate(spec: ControllerSpec, variables: Mapping[str, VariableDecl],
             inputs: Mapping[str, float],
             resolution: int = DEFAULT_RESOLUTION) -> float:
    return Controller(spec, variables, resolution).evaluate(inputs)
