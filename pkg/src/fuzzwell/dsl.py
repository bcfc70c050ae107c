"""Configuration language for linguistic variables and rule bases.

The format is a small declarative text language (``.fzc`` files):

    variable overall universe 0 100 {
      term L tri 0 0 50;
      term M tri 0 50 100;
      term H tri 50 100 100;
    }

    controller top inputs (health, productive, social) output overall {
      rule IF health IS L AND productive IS L AND social IS L THEN overall IS L;
    }

Comments run from ``#`` to end of line. Parsing stops at the first error;
validation collects all diagnostics (reference errors, coverage gaps,
rule-base completeness warnings) without raising.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator

from .fuzzy import (DEFAULT_RESOLUTION, FuzzyError, MembershipFunction,
                    Universe, crisp, trapezoidal, triangular)

KEYWORDS = frozenset({
    "variable", "universe", "term", "tri", "trap", "crisp",
    "controller", "inputs", "output", "rule", "IF", "AND", "THEN", "IS",
})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class DslError(Exception):
    """Parse error with source position (1-based line and column)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        where = f" (line {self.line}, col {self.col})" if self.line else ""
        return f"{self.severity}: {self.message}{where}"


@dataclass(frozen=True)
class TermDecl:
    name: str
    mf: MembershipFunction
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class VariableDecl:
    name: str
    lo: float
    hi: float
    terms: tuple[TermDecl, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)

    def universe(self, resolution: int = DEFAULT_RESOLUTION) -> Universe:
        return Universe(self.lo, self.hi, resolution)

    def term(self, name: str) -> TermDecl:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(f"variable '{self.name}' has no term '{name}'")


@dataclass(frozen=True)
class RuleDecl:
    antecedents: tuple[tuple[str, str], ...]  # (variable, term) pairs
    consequent: tuple[str, str]
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ControllerSpec:
    name: str
    inputs: tuple[str, ...]
    output: str
    rules: tuple[RuleDecl, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class ConfigDoc:
    variables: tuple[VariableDecl, ...]
    controllers: tuple[ControllerSpec, ...]

    def variable(self, name: str) -> VariableDecl:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(f"no variable '{name}' declared")

    def controller(self, name: str) -> ControllerSpec:
        for c in self.controllers:
            if c.name == name:
                return c
        raise KeyError(f"no controller '{name}' declared")


# ---------------------------------------------------------------------------
# Lexer

@dataclass(frozen=True)
class _Token:
    kind: str  # "ident" | "keyword" | "num" | punctuation literal | "eof"
    text: str
    line: int
    col: int

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<num>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[{}();,])
    """,
    re.VERBOSE,
)


def _lex(text: str) -> Iterator[_Token]:
    pos = 0
    line = 1
    col = 1
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslError(f"unexpected character {text[pos]!r}", line, col)
        tok_line, tok_col = line, col
        lexeme = m.group(0)
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        if kind == "ident":
            kind = "keyword" if lexeme in KEYWORDS else "ident"
        elif kind == "punct":
            kind = lexeme
        yield _Token(kind, lexeme, tok_line, tok_col)
    yield _Token("eof", "", line, col)


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_lex(text))
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None) -> DslError:
        tok = tok or self.cur
        raise DslError(message, tok.line, tok.col)

    def expect_kw(self, word: str) -> _Token:
        tok = self.cur
        if tok.kind != "keyword" or tok.text != word:
            self.fail(f"expected '{word}', found {tok.text!r}" if tok.text
                      else f"expected '{word}', found end of input")
        return self.advance()

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.cur
        if tok.kind != kind:
            self.fail(f"expected {what}, found {tok.text!r}" if tok.text
                      else f"expected {what}, found end of input")
        return self.advance()

    def ident(self, what: str = "identifier") -> _Token:
        return self.expect("ident", what)

    def number(self) -> float:
        tok = self.expect("num", "number")
        value = float(tok.text)
        if value != value or value in (float("inf"), float("-inf")):
            raise DslError(f"number out of range: {tok.text}", tok.line, tok.col)
        return value

    def config(self) -> ConfigDoc:
        variables: list[VariableDecl] = []
        controllers: list[ControllerSpec] = []
        while self.cur.kind != "eof":
            tok = self.cur
            if tok.kind == "keyword" and tok.text == "variable":
                variables.append(self.variable())
            elif tok.kind == "keyword" and tok.text == "controller":
                controllers.append(self.controller())
            else:
                self.fail(f"expected 'variable' or 'controller', "
                          f"found {tok.text!r}")
        return ConfigDoc(tuple(variables), tuple(controllers))

    def variable(self) -> VariableDecl:
        start = self.expect_kw("variable")
        name = self.ident("variable name").text
        self.expect_kw("universe")
        lo_tok = self.cur
        lo = self.number()
        hi = self.number()
        if lo >= hi:
            raise DslError(f"universe lo >= hi ({_fmt_num(lo)} >= {_fmt_num(hi)})",
                           lo_tok.line, lo_tok.col)
        self.expect("{", "'{'")
        terms = [self.term()]
        while self.cur.kind == "keyword" and self.cur.text == "term":
            terms.append(self.term())
        self.expect("}", "'}'")
        return VariableDecl(name, lo, hi, tuple(terms), (start.line, start.col))

    def term(self) -> TermDecl:
        start = self.expect_kw("term")
        name = self.ident("term name").text
        shape_tok = self.cur
        if shape_tok.kind != "keyword" or shape_tok.text not in ("tri", "trap", "crisp"):
            self.fail("expected shape 'tri', 'trap' or 'crisp', "
                      f"found {shape_tok.text!r}")
        self.advance()
        arity = {"tri": 3, "trap": 4, "crisp": 2}[shape_tok.text]
        nums = [self.number() for _ in range(arity)]
        self.expect(";", "';'")
        try:
            factory = {"tri": triangular, "trap": trapezoidal, "crisp": crisp}
            mf = factory[shape_tok.text](*nums)
        except FuzzyError as exc:
            raise DslError(str(exc), shape_tok.line, shape_tok.col) from None
        return TermDecl(name, mf, (start.line, start.col))

    def controller(self) -> ControllerSpec:
        start = self.expect_kw("controller")
        name = self.ident("controller name").text
        self.expect_kw("inputs")
        self.expect("(", "'('")
        inputs = [self.ident("input variable name").text]
        while self.cur.kind == ",":
            self.advance()
            inputs.append(self.ident("input variable name").text)
        self.expect(")", "')'")
        self.expect_kw("output")
        output = self.ident("output variable name").text
        self.expect("{", "'{'")
        rules = [self.rule()]
        while self.cur.kind == "keyword" and self.cur.text == "rule":
            rules.append(self.rule())
        self.expect("}", "'}'")
        return ControllerSpec(name, tuple(inputs), output, tuple(rules),
                              (start.line, start.col))

    def rule(self) -> RuleDecl:
        start = self.expect_kw("rule")
        self.expect_kw("IF")
        conds = [self.cond()]
        while self.cur.kind == "keyword" and self.cur.text == "AND":
            self.advance()
            conds.append(self.cond())
        self.expect_kw("THEN")
        out_var = self.ident("output variable name").text
        self.expect_kw("IS")
        out_term = self.ident("term name").text
        self.expect(";", "';'")
        return RuleDecl(tuple(conds), (out_var, out_term),
                        (start.line, start.col))

    def cond(self) -> tuple[str, str]:
        var = self.ident("variable name").text
        self.expect_kw("IS")
        term = self.ident("term name").text
        return var, term


def parse_config(text: str) -> ConfigDoc:
    """Parse configuration text; raises DslError on the first problem."""
    return _Parser(text).config()


# ---------------------------------------------------------------------------
# Validation

def validate(doc: ConfigDoc, resolution: int = DEFAULT_RESOLUTION) -> list[Diagnostic]:
    """Cross-reference and coverage checks over a parsed configuration.

    Returns diagnostics instead of raising; a config is usable when no
    diagnostic has severity "error". Incomplete rule bases produce one
    warning per uncovered input-term combination.
    """
    out: list[Diagnostic] = []

    def err(msg: str, pos: tuple[int, int]) -> None:
        out.append(Diagnostic("error", msg, pos[0], pos[1]))

    def warn(msg: str, pos: tuple[int, int]) -> None:
        out.append(Diagnostic("warning", msg, pos[0], pos[1]))

    seen_vars: dict[str, VariableDecl] = {}
    for v in doc.variables:
        if v.name in seen_vars:
            err(f"duplicate variable '{v.name}'", v.pos)
            continue
        seen_vars[v.name] = v
        seen_terms: set[str] = set()
        for t in v.terms:
            if t.name in seen_terms:
                err(f"duplicate term '{t.name}' in variable '{v.name}'", t.pos)
            seen_terms.add(t.name)
            a, b = t.mf.support
            if a < v.lo or b > v.hi:
                err(f"term '{t.name}' of variable '{v.name}' has breakpoints "
                    f"outside universe [{_fmt_num(v.lo)}, {_fmt_num(v.hi)}]",
                    t.pos)
        _check_coverage(v, resolution, out)

    seen_ctrl: set[str] = set()
    for c in doc.controllers:
        if c.name in seen_ctrl:
            err(f"duplicate controller '{c.name}'", c.pos)
            continue
        seen_ctrl.add(c.name)
        refs_ok = True
        seen_inputs: set[str] = set()
        for name in c.inputs:
            if name not in seen_vars:
                err(f"controller '{c.name}' references unknown input "
                    f"variable '{name}'", c.pos)
                refs_ok = False
            if name in seen_inputs:
                err(f"controller '{c.name}' declares input '{name}' twice", c.pos)
            seen_inputs.add(name)
        if c.output not in seen_vars:
            err(f"controller '{c.name}' references unknown output "
                f"variable '{c.output}'", c.pos)
            refs_ok = False
        if not c.rules:
            err(f"controller '{c.name}' has no rules", c.pos)

        rules_ok = True
        for i, r in enumerate(c.rules):
            seen_ante: set[str] = set()
            for var, term in r.antecedents:
                if var in seen_ante:
                    err(f"rule {i} of controller '{c.name}' repeats "
                        f"antecedent variable '{var}'", r.pos)
                    rules_ok = False
                seen_ante.add(var)
                if var not in c.inputs:
                    err(f"rule {i} of controller '{c.name}' references "
                        f"'{var}' which is not a declared input", r.pos)
                    rules_ok = False
                elif var in seen_vars and not _has_term(seen_vars[var], term):
                    err(f"rule {i} of controller '{c.name}' references "
                        f"undeclared term '{term}' of variable '{var}'", r.pos)
                    rules_ok = False
            out_var, out_term = r.consequent
            if out_var != c.output:
                err(f"rule {i} of controller '{c.name}' assigns to '{out_var}' "
                    f"instead of the declared output '{c.output}'", r.pos)
                rules_ok = False
            elif c.output in seen_vars and not _has_term(seen_vars[c.output], out_term):
                err(f"rule {i} of controller '{c.name}' references undeclared "
                    f"term '{out_term}' of output variable '{out_var}'", r.pos)
                rules_ok = False

        if refs_ok and rules_ok:
            for combo in _uncovered_combinations(c, seen_vars):
                pretty = ", ".join(f"{v}={t}" for v, t in combo)
                warn(f"controller '{c.name}' has no rule covering ({pretty})",
                     c.pos)
    return out


def _has_term(var: VariableDecl, term: str) -> bool:
    return any(t.name == term for t in var.terms)


def _check_coverage(v: VariableDecl, resolution: int,
                    out: list[Diagnostic]) -> None:
    xs = v.universe(resolution).grid()
    covered = None
    for t in v.terms:
        d = t.mf.sample(v.universe(resolution)) > 0.0
        covered = d if covered is None else (covered | d)
    if covered is not None and not covered.all():
        gap_x = xs[~covered][0]
        out.append(Diagnostic(
            "error",
            f"terms of variable '{v.name}' leave the universe uncovered "
            f"(no term has degree > 0 at x={gap_x:g})",
            v.pos[0], v.pos[1]))


def _uncovered_combinations(
    c: ControllerSpec, variables: dict[str, VariableDecl],
) -> Iterator[tuple[tuple[str, str], ...]]:
    term_lists = [[t.name for t in variables[name].terms] for name in c.inputs]
    rule_maps = [dict(r.antecedents) for r in c.rules]
    for combo in itertools.product(*term_lists):
        assignment = dict(zip(c.inputs, combo))
        # A rule covers the combination when its antecedents agree with it
        # on every variable the rule mentions.
        if not any(all(assignment.get(v) == t for v, t in rm.items())
                   for rm in rule_maps):
            yield tuple(zip(c.inputs, combo))


# ---------------------------------------------------------------------------
# Serialization

def _fmt_num(x: float) -> str:
    return str(int(x)) if x == int(x) and abs(x) < 1e15 else repr(x)


def serialize(doc: ConfigDoc) -> str:
    """Canonical text form; parse(serialize(doc)) is structurally == doc."""
    chunks: list[str] = []
    for v in doc.variables:
        lines = [f"variable {v.name} universe {_fmt_num(v.lo)} {_fmt_num(v.hi)} {{"]
        for t in v.terms:
            pts = " ".join(_fmt_num(p) for p in t.mf.points)
            lines.append(f"  term {t.name} {t.mf.shape_name} {pts};")
        lines.append("}")
        chunks.append("\n".join(lines))
    for c in doc.controllers:
        head = (f"controller {c.name} inputs ({', '.join(c.inputs)}) "
                f"output {c.output} {{")
        lines = [head]
        for r in c.rules:
            conds = " AND ".join(f"{v} IS {t}" for v, t in r.antecedents)
            out_var, out_term = r.consequent
            lines.append(f"  rule IF {conds} THEN {out_var} IS {out_term};")
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"
