import logging

import numpy as np
import pytest

from fuzzwell.dsl import parse_config
from fuzzwell.engine import Controller, EngineError, fire_rule, fuzzify
from fuzzwell.fuzzy import (EmptyAggregateError, clip, defuzzify_centroid,
                            mf_eval)
from fuzzwell.pipeline import default_config_text

from conftest import fine_grid_quotient

STANDARD = """
variable x universe 0 100 { term L tri 0 0 50; term M tri 0 50 100; term H tri 50 100 100; }
variable y universe 0 100 { term L tri 0 0 50; term M tri 0 50 100; term H tri 50 100 100; }
variable out universe 0 100 { term L tri 0 0 50; term M tri 0 50 100; term H tri 50 100 100; }
"""


def build(rule_lines, inputs="(x, y)"):
    text = STANDARD + (f"controller c inputs {inputs} output out {{\n"
                       + "\n".join(rule_lines) + "\n}")
    doc = parse_config(text)
    variables = {v.name: v for v in doc.variables}
    return Controller(doc.controllers[0], variables)


class TestFuzzify:
    def setup_method(self):
        self.var = parse_config(STANDARD).variable("x")

    def test_apex(self):
        assert fuzzify(self.var, 50.0) == {"L": 0.0, "M": 1.0, "H": 0.0}

    def test_crossover(self):
        assert fuzzify(self.var, 25.0) == {"L": 0.5, "M": 0.5, "H": 0.0}

    def test_clamps_below_universe(self, caplog):
        with caplog.at_level(logging.WARNING):
            degrees = fuzzify(self.var, -3.0)
        assert degrees == {"L": 1.0, "M": 0.0, "H": 0.0}
        assert any("clamped" in r.message for r in caplog.records)

    def test_clamps_above_universe(self):
        assert fuzzify(self.var, 100.3) == {"L": 0.0, "M": 0.0, "H": 1.0}


class TestFireRule:
    def test_min_over_antecedents(self):
        ctrl = build(["rule IF x IS M AND y IS H THEN out IS M;"])
        rule = ctrl.spec.rules[0]
        fz = {"x": {"L": 0, "M": 0.2, "H": 0}, "y": {"L": 0, "M": 0, "H": 0.9}}
        assert fire_rule(rule, fz) == 0.2

    def test_zero_antecedent_silences(self):
        ctrl = build(["rule IF x IS M AND y IS H THEN out IS M;"])
        fz = {"x": {"M": 0.0}, "y": {"H": 0.9}}
        assert fire_rule(ctrl.spec.rules[0], fz) == 0.0

    def test_single_antecedent_passthrough(self):
        ctrl = build(["rule IF x IS M THEN out IS M;"])
        assert fire_rule(ctrl.spec.rules[0], {"x": {"M": 0.73}}) == 0.73

    def test_missing_variable_is_named(self):
        ctrl = build(["rule IF x IS M AND y IS H THEN out IS M;"])
        with pytest.raises(EngineError, match="'y'"):
            fire_rule(ctrl.spec.rules[0], {"x": {"M": 0.5}})


class TestInfer:
    def test_single_full_strength_rule_reproduces_consequent(self):
        ctrl = build(["rule IF x IS M AND y IS M THEN out IS H;",
                      "rule IF x IS L AND y IS L THEN out IS L;"])
        fset = ctrl.infer({"x": 50.0, "y": 50.0})
        expected = ctrl.output_var.term("H").mf.sample(ctrl.output_universe)
        np.testing.assert_array_equal(fset.degrees, expected)

    def test_crossover_fires_two_rules_bimodal(self):
        ctrl = build(["rule IF x IS L THEN out IS L;",
                      "rule IF x IS M THEN out IS H;"], inputs="(x)")
        fset = ctrl.infer({"x": 25.0})
        xs = ctrl.output_universe.grid()
        l_mf = ctrl.output_var.term("L").mf
        h_mf = ctrl.output_var.term("H").mf
        expected = np.array([max(min(mf_eval(l_mf, v), 0.5),
                                 min(mf_eval(h_mf, v), 0.5)) for v in xs])
        np.testing.assert_allclose(fset.degrees, expected, atol=1e-15)

    def test_no_rule_fires_raises(self):
        ctrl = build(["rule IF x IS H AND y IS H THEN out IS H;"])
        with pytest.raises(EmptyAggregateError, match="'c'"):
            ctrl.infer({"x": 0.0, "y": 0.0})

    def test_missing_crisp_input_raises(self):
        ctrl = build(["rule IF x IS H AND y IS H THEN out IS H;"])
        with pytest.raises(EngineError, match="y"):
            ctrl.infer({"x": 10.0})


class TestEvaluate:
    def test_single_rule_centroid_is_consequent_centroid(self):
        ctrl = build(["rule IF x IS H AND y IS H THEN out IS H;"])
        got = ctrl.evaluate({"x": 100.0, "y": 100.0})
        isolated = defuzzify_centroid(
            clip(ctrl.output_var.term("H").mf, 1.0, ctrl.output_universe))
        assert got == pytest.approx(isolated, abs=1e-12)

    def test_two_rule_crossover_matches_fine_grid_oracle(self):
        ctrl = build(["rule IF x IS L THEN out IS L;",
                      "rule IF x IS M THEN out IS H;"], inputs="(x)")
        got = ctrl.evaluate({"x": 25.0})
        want = fine_grid_quotient(ctrl.infer({"x": 25.0}))
        assert got == pytest.approx(want, rel=1e-6)

    def test_output_within_universe(self):
        ctrl = build(["rule IF x IS L THEN out IS L;",
                      "rule IF x IS M THEN out IS M;",
                      "rule IF x IS H THEN out IS H;"], inputs="(x)")
        for v in np.linspace(0, 100, 23):
            assert 0.0 <= ctrl.evaluate({"x": v}) <= 100.0

    def test_monotone_staircase_on_shipped_config(self):
        doc = parse_config(default_config_text())
        variables = {v.name: v for v in doc.variables}
        top = Controller(doc.controller("overall"), variables)
        lo = top.evaluate({"health": 10, "productive": 10, "social": 10})
        mid = top.evaluate({"health": 50, "productive": 50, "social": 50})
        hi = top.evaluate({"health": 90, "productive": 90, "social": 90})
        assert lo < mid < hi


def naive_mamdani(spec, variables, inputs, resolution=1001):
    """Whole-path oracle: independent formulation of the same semantics.

    Membership degrees come from the min(rise, fall) closed form instead
    of branch-by-interval evaluation, accumulation is pure Python, and the
    centroid uses fsum; only the mathematical definitions are shared with
    the engine.
    """
    import math

    def degree(mf, x):
        p = mf.points
        if mf.kind == 0:
            a, b, c = p
            rise = (x - a) / (b - a) if b > a else math.inf
            fall = (c - x) / (c - b) if c > b else math.inf
            if rise is math.inf and fall is math.inf:
                return 1.0 if x == a else 0.0
            return max(0.0, min(rise, fall, 1.0))
        if mf.kind == 1:
            a, b, c, d = p
            rise = (x - a) / (b - a) if b > a else math.inf
            fall = (d - x) / (d - c) if d > c else math.inf
            if a <= x <= d:
                return max(0.0, min(rise, fall, 1.0))
            return 0.0
        return 1.0 if p[0] <= x <= p[1] else 0.0

    out_var = variables[spec.output]
    n = resolution
    xs = [out_var.lo + i * (out_var.hi - out_var.lo) / (n - 1) for i in range(n)]
    agg = [0.0] * n
    fired = False
    for rule in spec.rules:
        act = 1.0
        for var_name, term_name in rule.antecedents:
            var = variables[var_name]
            x = min(max(inputs[var_name], var.lo), var.hi)
            act = min(act, degree(var.term(term_name).mf, x))
        if act <= 0.0:
            continue
        fired = True
        cons = out_var.term(rule.consequent[1]).mf
        for i, x in enumerate(xs):
            v = min(degree(cons, x), act)
            if v > agg[i]:
                agg[i] = v
    if not fired:
        raise EmptyAggregateError("no rule fired")
    num = math.fsum(x * d for x, d in zip(xs, agg))
    den = math.fsum(agg)
    return num / den


class TestWholePathOracle:
    def test_random_controllers_match_naive_reimplementation(self):
        rng = np.random.default_rng(17)
        rules = ["rule IF x IS L AND y IS L THEN out IS L;",
                 "rule IF x IS L AND y IS M THEN out IS L;",
                 "rule IF x IS L AND y IS H THEN out IS M;",
                 "rule IF x IS M AND y IS L THEN out IS L;",
                 "rule IF x IS M AND y IS M THEN out IS M;",
                 "rule IF x IS M AND y IS H THEN out IS H;",
                 "rule IF x IS H AND y IS L THEN out IS M;",
                 "rule IF x IS H AND y IS M THEN out IS H;",
                 "rule IF x IS H AND y IS H THEN out IS H;"]
        ctrl = build(rules)
        variables = {"x": ctrl.input_vars["x"], "y": ctrl.input_vars["y"],
                     "out": ctrl.output_var}
        for _ in range(40):
            inputs = {"x": float(rng.uniform(-5, 105)),
                      "y": float(rng.uniform(-5, 105))}
            got = ctrl.evaluate(inputs)
            want = naive_mamdani(ctrl.spec, variables, inputs)
            assert got == pytest.approx(want, rel=1e-9)


class TestOtherConsequentShapes:
    def test_trapezoid_and_crisp_consequents(self):
        text = STANDARD.replace(
            "variable out universe 0 100 { term L tri 0 0 50; "
            "term M tri 0 50 100; term H tri 50 100 100; }",
            "variable out universe 0 100 { term L trap 0 0 20 40; "
            "term M crisp 45 55; term H trap 60 80 100 100; }")
        doc = parse_config(text + "controller c inputs (x) output out {"
                                  " rule IF x IS M THEN out IS M; }")
        ctrl = Controller(doc.controllers[0],
                          {v.name: v for v in doc.variables})
        # crisp(45, 55) is symmetric about 50
        assert ctrl.evaluate({"x": 50.0}) == pytest.approx(50.0, abs=1e-9)


class TestModuleHelpers:
    def test_one_shot_infer_and_evaluate(self):
        doc = parse_config(STANDARD + "controller c inputs (x) output out "
                                      "{ rule IF x IS M THEN out IS M; }")
        variables = {v.name: v for v in doc.variables}
        from fuzzwell.engine import evaluate, infer
        fset = infer(doc.controllers[0], variables, {"x": 50.0})
        assert fset.degrees.max() == 1.0
        assert evaluate(doc.controllers[0], variables, {"x": 50.0}) == \
            pytest.approx(50.0, abs=1e-9)


class TestEngineProperties:
    def _rules(self):
        return ["rule IF x IS L AND y IS L THEN out IS L;",
                "rule IF x IS L AND y IS M THEN out IS M;",
                "rule IF x IS M AND y IS M THEN out IS M;",
                "rule IF x IS M AND y IS H THEN out IS H;",
                "rule IF x IS H AND y IS H THEN out IS H;",
                "rule IF x IS H AND y IS L THEN out IS M;",
                "rule IF x IS L AND y IS H THEN out IS M;",
                "rule IF x IS M AND y IS L THEN out IS L;",
                "rule IF x IS H AND y IS M THEN out IS H;"]

    def test_rule_order_permutation_invariance(self):
        rng = np.random.default_rng(7)
        rules = self._rules()
        base = build(rules)
        points = [(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(20)]
        expected = [base.evaluate({"x": x, "y": y}) for x, y in points]
        for _ in range(5):
            rng.shuffle(rules)
            ctrl = build(rules)
            got = [ctrl.evaluate({"x": x, "y": y}) for x, y in points]
            assert got == expected

    def test_rule_duplication_invariance(self):
        rules = self._rules()
        base = build(rules)
        doubled = build(rules + rules[:4])
        for x in (10.0, 33.0, 50.0, 77.0):
            assert doubled.evaluate({"x": x, "y": x}) == \
                base.evaluate({"x": x, "y": x})

    def test_shared_consequent_equals_clipped_term_centroid(self):
        ctrl = build(["rule IF x IS L THEN out IS M;",
                      "rule IF x IS M THEN out IS M;"], inputs="(x)")
        x = 30.0  # L fires at 0.4, M at 0.6
        got = ctrl.evaluate({"x": x})
        max_act = max(mf_eval(ctrl.input_vars["x"].term("L").mf, x),
                      mf_eval(ctrl.input_vars["x"].term("M").mf, x))
        want = defuzzify_centroid(
            clip(ctrl.output_var.term("M").mf, max_act, ctrl.output_universe))
        assert got == pytest.approx(want, abs=1e-12)

    def test_continuity_probe(self):
        # No output jumps under 1e-6 input perturbation away from term
        # boundaries (where the active rule set is locally constant).
        ctrl = build(self._rules())
        rng = np.random.default_rng(3)
        eps = 1e-6
        for _ in range(25):
            x, y = rng.uniform(5, 45), rng.uniform(55, 95)
            base = ctrl.evaluate({"x": x, "y": y})
            assert abs(ctrl.evaluate({"x": x + eps, "y": y}) - base) <= 1e-4
            assert abs(ctrl.evaluate({"x": x, "y": y + eps}) - base) <= 1e-4
