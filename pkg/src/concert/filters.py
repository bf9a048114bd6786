"""Boolean filter expressions over team metrics and course baselines.

Grammar (case-insensitive keywords, whitespace insignificant):

    expr    := or
    or      := and ("or" and)*
    and     := unary ("and" unary)*
    unary   := "not" unary | "(" expr ")" | atom | "@" name
    atom    := metric "." stat cmp operand
    metric  := posts | replies | commits | additions | tickets
    stat    := total | diff | normdiff | max | min
    cmp     := < | <= | > | >= | == | !=
    operand := number
             | "course" "." ("mean"|"median") "." ("total"|"diff") "." metric ["*" number]

The text form is also the persisted and wire format for saved filters, so
parse and print are exact inverses on expression trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Sequence, Union

from .errors import (
    BadBand,
    FilterSyntaxError,
    InvalidValue,
    NameExists,
    NameInUse,
    NotFound,
    RefCycle,
    UnknownMetric,
    UnknownStat,
    UnresolvedRef,
)
from .metrics import CourseStats, TeamMetrics
from .model import MetricKind

NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")

_METRICS = {k.value: k for k in MetricKind}


class AtomStat(Enum):
    TOTAL = "total"
    DIFF = "diff"
    NORMDIFF = "normdiff"
    MEMBER_MAX = "max"
    MEMBER_MIN = "min"


_STATS = {s.value: s for s in AtomStat}


class Comparator(Enum):
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    EQ = "=="
    NE = "!="


class BaselineStat(Enum):
    MEAN = "mean"
    MEDIAN = "median"


class BaselineOf(Enum):
    TOTALS = "total"
    DIFFS = "diff"


@dataclass(frozen=True)
class Baseline:
    """A course-wide operand, e.g. course.median.total.commits * 0.75."""

    stat: BaselineStat
    of: BaselineOf
    metric: MetricKind
    scale: float = 1

    def value(self, stats: CourseStats) -> float:
        table = {
            (BaselineStat.MEAN, BaselineOf.TOTALS): stats.mean_total,
            (BaselineStat.MEDIAN, BaselineOf.TOTALS): stats.median_total,
            (BaselineStat.MEAN, BaselineOf.DIFFS): stats.mean_diff,
            (BaselineStat.MEDIAN, BaselineOf.DIFFS): stats.median_diff,
        }[(self.stat, self.of)]
        return table[self.metric] * self.scale


@dataclass(frozen=True)
class Atom:
    metric: MetricKind
    stat: AtomStat
    cmp: Comparator
    operand: Union[int, float, Baseline]


@dataclass(frozen=True)
class And:
    children: tuple["FilterExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["FilterExpr", ...]


@dataclass(frozen=True)
class Not:
    child: "FilterExpr"


@dataclass(frozen=True)
class Ref:
    name: str


FilterExpr = Union[Atom, And, Or, Not, Ref]


@dataclass(frozen=True)
class SavedFilter:
    name: str
    expr: FilterExpr
    created_at: datetime


# --- tokenizer / parser ------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<num>\d+(?:\.\d+)?)
  | (?P<cmp><=|>=|==|!=|<|>)
  | (?P<star>\*)
  | (?P<dot>\.)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<ref>@[A-Za-z0-9_.\-]+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FilterSyntaxError(f"unexpected character {text[pos]!r}", location=pos)
        tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is not None:
            self.i += 1
        return tok

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "word" and tok[1].lower() in words

    def error(self, message: str):
        tok = self.peek()
        offset = tok[2] if tok is not None else len(self.text)
        raise FilterSyntaxError(message, location=offset)

    def parse(self) -> FilterExpr:
        expr = self.parse_or()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r} after expression")
        return expr

    def parse_or(self) -> FilterExpr:
        parts = [self.parse_and()]
        while self.at_word("or"):
            self.next()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> FilterExpr:
        parts = [self.parse_unary()]
        while self.at_word("and"):
            self.next()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> FilterExpr:
        tok = self.peek()
        if tok is None:
            self.error("expected a filter term")
        if self.at_word("not"):
            self.next()
            return Not(self.parse_unary())
        if tok[0] == "lparen":
            self.next()
            expr = self.parse_or()
            closing = self.peek()
            if closing is None or closing[0] != "rparen":
                self.error("expected ')'")
            self.next()
            return expr
        if tok[0] == "ref":
            self.next()
            return Ref(tok[1][1:])
        return self.parse_atom()

    def parse_atom(self) -> Atom:
        metric = self._metric()
        self._expect("dot", "expected '.' after metric name")
        tok = self.next()
        if tok is None or tok[0] != "word":
            self.error("expected a statistic name")
        stat_name = tok[1].lower()
        if stat_name not in _STATS:
            raise UnknownStat(f"unknown statistic {tok[1]!r}", location=tok[2])
        cmp_tok = self.next()
        if cmp_tok is None or cmp_tok[0] != "cmp":
            self.i -= 1 if cmp_tok is not None else 0
            self.error("expected a comparator (<, <=, >, >=, ==, !=)")
        operand = self.parse_operand()
        return Atom(metric, _STATS[stat_name], Comparator(cmp_tok[1]), operand)

    def parse_operand(self):
        tok = self.peek()
        if tok is None:
            self.error("expected a number or course baseline")
        if tok[0] == "num":
            self.next()
            return _number(tok[1])
        if tok[0] == "word" and tok[1].lower() == "course":
            self.next()
            self._expect("dot", "expected '.' after 'course'")
            stat_tok = self.next()
            if stat_tok is None or stat_tok[0] != "word" or stat_tok[1].lower() not in ("mean", "median"):
                self.error("expected 'mean' or 'median'")
            self._expect("dot", "expected '.'")
            of_tok = self.next()
            if of_tok is None or of_tok[0] != "word" or of_tok[1].lower() not in ("total", "diff"):
                self.error("expected 'total' or 'diff'")
            self._expect("dot", "expected '.'")
            metric = self._metric()
            scale = 1
            if self.peek() is not None and self.peek()[0] == "star":
                self.next()
                num_tok = self.next()
                if num_tok is None or num_tok[0] != "num":
                    self.i -= 1 if num_tok is not None else 0
                    self.error("expected a number after '*'")
                scale = _number(num_tok[1])
            return Baseline(
                BaselineStat(stat_tok[1].lower()),
                BaselineOf(of_tok[1].lower()),
                metric,
                scale,
            )
        self.error("expected a number or course baseline")

    def _metric(self) -> MetricKind:
        tok = self.next()
        if tok is None or tok[0] != "word":
            self.i -= 1 if tok is not None else 0
            self.error("expected a metric name")
        name = tok[1].lower()
        if name not in _METRICS:
            raise UnknownMetric(f"unknown metric {tok[1]!r}", location=tok[2])
        return _METRICS[name]

    def _expect(self, kind: str, message: str):
        tok = self.peek()
        if tok is None or tok[0] != kind:
            self.error(message)
        self.next()


def _number(text: str):
    return float(text) if "." in text else int(text)


def parse_filter(text: str) -> FilterExpr:
    """Parse filter text into an expression tree (standard not > and > or)."""
    return _Parser(text).parse()


# --- printer -----------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3, Atom: 4, Ref: 4}


def print_filter(expr: FilterExpr) -> str:
    """Render a tree to grammar text; parse(print(t)) == t for any tree."""
    return _print(expr)


def _print(expr: FilterExpr) -> str:
    if isinstance(expr, Atom):
        return f"{expr.metric.value}.{expr.stat.value} {expr.cmp.value} {_print_operand(expr.operand)}"
    if isinstance(expr, Ref):
        return f"@{expr.name}"
    if isinstance(expr, Not):
        return f"not {_child(expr.child, Not)}"
    if isinstance(expr, And):
        return " and ".join(_child(c, And) for c in expr.children)
    return " or ".join(_child(c, Or) for c in expr.children)


def _child(child: FilterExpr, parent_type) -> str:
    text = _print(child)
    # parenthesize lower precedence and same-operator nesting so the
    # reparse rebuilds exactly the original tree shape
    if _PREC[type(child)] < _PREC[parent_type] or type(child) is parent_type is not Not:
        return f"({text})"
    return text


def _print_operand(operand) -> str:
    if isinstance(operand, Baseline):
        text = f"course.{operand.stat.value}.{operand.of.value}.{operand.metric.value}"
        if operand.scale != 1:
            text += f" * {_print_number(operand.scale)}"
        return text
    return _print_number(operand)


def _print_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


# --- evaluation ----------------------------------------------------------------

_CMP_FN = {
    Comparator.LT: lambda a, b: a < b,
    Comparator.LE: lambda a, b: a <= b,
    Comparator.GT: lambda a, b: a > b,
    Comparator.GE: lambda a, b: a >= b,
    Comparator.EQ: lambda a, b: a == b,
    Comparator.NE: lambda a, b: a != b,
}


def refs_in(expr: FilterExpr) -> set[str]:
    """Names of all saved filters referenced anywhere in the tree."""
    if isinstance(expr, Ref):
        return {expr.name}
    if isinstance(expr, Not):
        return refs_in(expr.child)
    if isinstance(expr, (And, Or)):
        out: set[str] = set()
        for child in expr.children:
            out |= refs_in(child)
        return out
    return set()


def evaluate(
    expr: FilterExpr,
    team: TeamMetrics,
    stats: CourseStats,
    refs: Mapping[str, FilterExpr] | None = None,
    _path: tuple[str, ...] = (),
) -> bool:
    """Standard boolean semantics; @refs resolve through `refs` with cycle detection."""
    if isinstance(expr, Atom):
        lhs = _atom_lhs(expr, team)
        rhs = expr.operand.value(stats) if isinstance(expr.operand, Baseline) else expr.operand
        return _CMP_FN[expr.cmp](lhs, rhs)
    if isinstance(expr, And):
        return all(evaluate(c, team, stats, refs, _path) for c in expr.children)
    if isinstance(expr, Or):
        return any(evaluate(c, team, stats, refs, _path) for c in expr.children)
    if isinstance(expr, Not):
        return not evaluate(expr.child, team, stats, refs, _path)
    # Ref
    if expr.name in _path:
        raise RefCycle(list(_path[_path.index(expr.name):]) + [expr.name])
    target = (refs or {}).get(expr.name)
    if target is None:
        raise UnresolvedRef(expr.name)
    return evaluate(target, team, stats, refs, _path + (expr.name,))


def _atom_lhs(atom: Atom, team: TeamMetrics):
    if atom.stat is AtomStat.TOTAL:
        return team.total[atom.metric]
    if atom.stat is AtomStat.DIFF:
        return team.diff[atom.metric]
    if atom.stat is AtomStat.NORMDIFF:
        return team.normdiff[atom.metric]
    if atom.stat is AtomStat.MEMBER_MAX:
        return team.member_max(atom.metric)
    return team.member_min(atom.metric)


def apply_filter(
    expr: FilterExpr,
    team_metrics: Sequence[TeamMetrics],
    stats: CourseStats,
    refs: Mapping[str, FilterExpr] | None = None,
) -> list[str]:
    """Team ids for which the filter holds, in ascending team_id order."""
    return sorted(tm.team_id for tm in team_metrics if evaluate(expr, tm, stats, refs))


# --- predefined median-range filters ---------------------------------------------

def predefined_filters(
    band: float = 0.25,
    metric: MetricKind = MetricKind.COMMITS,
) -> dict[str, FilterExpr]:
    """Below / within / above a relative band around the course median submissions.

    The three filters partition any team set: each team matches exactly one.
    Course stats are referenced symbolically, so the same expressions stay
    valid as the baseline moves.
    """
    if not 0 < band < 1:
        raise BadBand(f"band must be in (0, 1), got {band}")
    lo = Baseline(BaselineStat.MEDIAN, BaselineOf.TOTALS, metric, 1 - band)
    hi = Baseline(BaselineStat.MEDIAN, BaselineOf.TOTALS, metric, 1 + band)
    return {
        "below_median_range": Atom(metric, AtomStat.TOTAL, Comparator.LT, lo),
        "within_median_range": And((
            Atom(metric, AtomStat.TOTAL, Comparator.GE, lo),
            Atom(metric, AtomStat.TOTAL, Comparator.LE, hi),
        )),
        "above_median_range": Atom(metric, AtomStat.TOTAL, Comparator.GT, hi),
    }


# --- saved-filter store ---------------------------------------------------------

class FilterStore:
    """Named saved filters with referential integrity and cycle rejection.

    Mutations must be serialized by the caller (the service holds one lock
    per data store); reads hand out immutable values.
    """

    def __init__(self):
        self._filters: dict[str, SavedFilter] = {}

    def save(
        self,
        name: str,
        expr: FilterExpr,
        overwrite: bool = False,
        created_at: datetime | None = None,
    ) -> SavedFilter:
        if not NAME_RE.match(name or ""):
            raise InvalidValue(
                f"filter name {name!r} must be non-empty, without whitespace "
                "(letters, digits, '_', '-', '.')"
            )
        if name in self._filters and not overwrite:
            raise NameExists(f"filter {name!r} already exists")
        candidate = dict(self.snapshot())
        candidate[name] = expr
        for ref in sorted(refs_in(expr)):
            if ref not in candidate:
                raise UnresolvedRef(ref)
        self._check_acyclic(name, candidate)
        saved = SavedFilter(name, expr, created_at or datetime.now(timezone.utc))
        self._filters[name] = saved
        return saved

    def get(self, name: str) -> SavedFilter:
        if name not in self._filters:
            raise NotFound(f"no saved filter named {name!r}")
        return self._filters[name]

    def list(self) -> list[SavedFilter]:
        return [self._filters[name] for name in sorted(self._filters)]

    def delete(self, name: str) -> None:
        if name not in self._filters:
            raise NotFound(f"no saved filter named {name!r}")
        for other in sorted(self._filters):
            if other != name and name in refs_in(self._filters[other].expr):
                raise NameInUse(name, by=other)
        del self._filters[name]

    def snapshot(self) -> dict[str, FilterExpr]:
        """Immutable view used for evaluation: name -> expression."""
        return {name: sf.expr for name, sf in self._filters.items()}

    @staticmethod
    def _check_acyclic(start: str, exprs: Mapping[str, FilterExpr]) -> None:
        path: list[str] = []

        def visit(name: str):
            if name in path:
                raise RefCycle(path[path.index(name):] + [name])
            if name not in exprs:
                return  # dangling refs are caught separately at save time
            path.append(name)
            for ref in sorted(refs_in(exprs[name])):
                visit(ref)
            path.pop()

        visit(start)
