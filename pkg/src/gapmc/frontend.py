"""Text and JSON front end: parsers and serializers for systems, formulas,
valuations, finite transition systems, monotonicity graphs, symbolic sets and
quantified boolean formulas.

System files look like::

    gcs {
      vars: x, y;
      consts: 0;
    }
    rule CX [a]: x > x' & x' >= 0 & y = y';
    rule CY [b]: y > y' & x' >= x & y' >= 0;

Clauses are written ``a - b >= k`` with sugar ``a >= b``, ``a > b`` and
``a = b`` (the latter expands to two clauses).  Formulas use ``true``,
``false``, clauses, ``!``, ``&``, ``|``, ``<a>{...}``, ``EF[a,b]{...}``,
``AG``, ``[a]``, ``EG`` and ``E(f U g)``; ``{...}`` carries an optional
transition guard.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bisim import FiniteLts
from .gcs import Gcs, TransitionRule, Valuation
from .logic import (
    AndF,
    Atom,
    Diamond,
    Ef,
    Eg,
    Eu,
    Formula,
    NotF,
    OrF,
    TrueF,
    ag,
    box,
    false_,
)
from .mg import NEG_INF, POS_INF, Clause, MonotonicityGraph, Node, is_const, is_primed
from .reductions import BAnd, BNot, BOr, BVar, BoolExpr, Qbf
from .sets import SymbolicSet, make_set


class ParseError(ValueError):
    """Input text the parsers cannot make sense of; carries line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f" at line {line}, column {col}" if line else ""
        super().__init__(f"{message}{where}")


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*'?)
  | (?P<op>->|>=|=|>|<|\{|\}|\(|\)|\[|\]|!|&|\||,|;|:|-)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "name" | "op" | "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind != "ws":
            out.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        t = self.peek()
        if t.text == text and t.kind != "eof":
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}",
                             t.line, t.col)
        return t

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)


# -- clauses -----------------------------------------------------------------


def _parse_term(ts: _Stream) -> Node:
    t = ts.next()
    if t.kind == "num":
        return int(t.text)
    if t.kind == "name":
        return t.text
    raise ParseError(f"expected a variable or constant, found {t.text!r}",
                     t.line, t.col)


def _parse_clause_group(ts: _Stream) -> list[Clause]:
    """One comparison, expanded to gap clauses: ``a - b >= k`` verbatim,
    ``a >= b`` (k=0), ``a > b`` (k=1), ``a = b`` (both directions)."""
    left = _parse_term(ts)
    if ts.accept("-"):
        right = _parse_term(ts)
        ts.expect(">=")
        t = ts.next()
        if t.kind != "num":
            raise ParseError(f"expected an integer offset, found {t.text!r}",
                             t.line, t.col)
        return [Clause(left, right, int(t.text))]
    op = ts.next()
    if op.text not in (">=", ">", "="):
        raise ParseError(f"expected a comparison, found {op.text!r}", op.line, op.col)
    right = _parse_term(ts)
    if op.text == ">=":
        return [Clause(left, right, 0)]
    if op.text == ">":
        return [Clause(left, right, 1)]
    return [Clause(left, right, 0), Clause(right, left, 0)]


def _parse_clause_list(ts: _Stream, sep: str = "&") -> list[Clause]:
    clauses = _parse_clause_group(ts)
    while ts.accept(sep):
        clauses += _parse_clause_group(ts)
    return clauses


def parse_clauses(text: str) -> tuple[Clause, ...]:
    """A ``&``-separated clause conjunction, e.g. ``x > y & y >= 0``."""
    ts = _Stream(tokenize(text))
    if ts.peek().kind == "eof":
        return ()
    clauses = _parse_clause_list(ts)
    if ts.peek().kind != "eof":
        ts.fail(f"trailing input {ts.peek().text!r}")
    return tuple(clauses)


def serialize_clause(c: Clause) -> str:
    return f"{c.left} - {c.right} >= {c.k}"


# -- systems -----------------------------------------------------------------


def parse_gcs(text: str) -> Gcs:
    ts = _Stream(tokenize(text))
    ts.expect("gcs")
    ts.expect("{")
    vars: tuple[str, ...] = ()
    consts: tuple[int, ...] = ()
    while not ts.accept("}"):
        key = ts.next()
        ts.expect(":")
        if key.text == "vars":
            names = [ts.next()]
            while ts.accept(","):
                names.append(ts.next())
            for t in names:
                if t.kind != "name" or t.text.endswith("'"):
                    raise ParseError(f"bad variable name {t.text!r}", t.line, t.col)
            vars = tuple(t.text for t in names)
        elif key.text == "consts":
            nums = [ts.next()]
            while ts.accept(","):
                nums.append(ts.next())
            for t in nums:
                if t.kind != "num":
                    raise ParseError(f"bad constant {t.text!r}", t.line, t.col)
            consts = tuple(int(t.text) for t in nums)
        else:
            raise ParseError(f"unknown header entry {key.text!r}", key.line, key.col)
        ts.expect(";")
    rules = []
    acts = []
    while ts.peek().kind != "eof":
        ts.expect("rule")
        name = ts.next()
        if ts.accept("["):
            label = ts.next().text
            ts.expect("]")
        else:
            label = "act"  # unlabeled rules share one implicit action
        ts.expect(":")
        clauses = _parse_clause_list(ts)
        ts.expect(";")
        if label not in acts:
            acts.append(label)
        rules.append(TransitionRule(name.text, tuple(clauses), label))
    return Gcs(vars, consts, tuple(acts), tuple(rules))


def serialize_gcs(g: Gcs) -> str:
    lines = [
        "gcs {",
        "  vars: " + ", ".join(g.vars) + ";",
        "  consts: " + ", ".join(str(c) for c in g.consts) + ";",
        "}",
    ]
    for r in g.rules:
        body = " & ".join(serialize_clause(c) for c in r.clauses)
        lines.append(f"rule {r.name} [{r.label}]: {body};")
    return "\n".join(lines) + "\n"


# -- formulas ----------------------------------------------------------------


def parse_formula(text: str) -> Formula:
    ts = _Stream(tokenize(text))
    f = _parse_or(ts)
    if ts.peek().kind != "eof":
        ts.fail(f"trailing input {ts.peek().text!r}")
    return f


def _parse_or(ts: _Stream) -> Formula:
    f = _parse_and(ts)
    while ts.accept("|"):
        f = OrF(f, _parse_and(ts))
    return f


def _parse_and(ts: _Stream) -> Formula:
    f = _parse_unary(ts)
    while ts.accept("&"):
        f = AndF(f, _parse_unary(ts))
    return f


def _parse_guard(ts: _Stream) -> tuple[Clause, ...]:
    if not ts.accept("{"):
        return ()
    if ts.accept("}"):
        return ()
    clauses = _parse_clause_list(ts)
    ts.expect("}")
    return tuple(clauses)


def _parse_action_list(ts: _Stream) -> Optional[tuple[str, ...]]:
    if not ts.accept("["):
        return None
    names = [ts.next().text]
    while ts.accept(","):
        names.append(ts.next().text)
    ts.expect("]")
    return tuple(names)


def _parse_unary(ts: _Stream) -> Formula:
    t = ts.peek()
    if ts.accept("!"):
        return NotF(_parse_unary(ts))
    if ts.accept("<"):
        act = ts.next()
        ts.expect(">")
        guard = _parse_guard(ts)
        return Diamond(act.text, _parse_unary(ts), guard)
    if t.text == "[":
        ts.next()
        act = ts.next()
        ts.expect("]")
        return box(act.text, _parse_unary(ts))
    if t.text == "EF":
        ts.next()
        actions = _parse_action_list(ts)
        guard = _parse_guard(ts)
        return Ef(_parse_unary(ts), guard, actions)
    if t.text == "AG":
        ts.next()
        actions = _parse_action_list(ts)
        guard = _parse_guard(ts)
        return ag(_parse_unary(ts), guard, actions)
    if t.text == "EG":
        ts.next()
        actions = _parse_action_list(ts)
        guard = _parse_guard(ts)
        return Eg(_parse_unary(ts), guard, actions)
    if t.text == "E":
        ts.next()
        ts.expect("(")
        left = _parse_or(ts)
        ts.expect("U")
        right = _parse_or(ts)
        ts.expect(")")
        return Eu(left, right)
    return _parse_primary(ts)


def _parse_primary(ts: _Stream) -> Formula:
    t = ts.peek()
    if ts.accept("true"):
        return TrueF()
    if ts.accept("false"):
        return false_()
    if ts.accept("("):
        f = _parse_or(ts)
        ts.expect(")")
        return f
    if t.kind in ("name", "num"):
        group = _parse_clause_group(ts)
        f: Formula = Atom(group[0])
        for c in group[1:]:
            f = AndF(f, Atom(c))
        return f
    ts.fail(f"expected a formula, found {t.text or 'end of input'!r}")


def serialize_formula(f: Formula) -> str:
    def guard_str(guard: Sequence[Clause]) -> str:
        if not guard:
            return ""
        return "{" + " & ".join(serialize_clause(c) for c in guard) + "}"

    def acts_str(actions: Optional[Sequence[str]]) -> str:
        return "" if actions is None else "[" + ",".join(actions) + "]"

    def go(f: Formula, prec: int) -> str:
        # prec: 0 = or-context, 1 = and-context, 2 = unary argument
        if isinstance(f, TrueF):
            return "true"
        if isinstance(f, Atom):
            s = "(" + serialize_clause(f.clause) + ")"
            return s
        if isinstance(f, NotF):
            return "!" + go(f.f, 2)
        if isinstance(f, Diamond):
            s = f"<{f.action}>{guard_str(f.guard)} " + go(f.f, 2)
            return f"({s})" if prec >= 2 else s
        if isinstance(f, Ef):
            s = f"EF{acts_str(f.actions)}{guard_str(f.guard)} " + go(f.f, 2)
            return f"({s})" if prec >= 2 else s
        if isinstance(f, Eg):
            s = f"EG{acts_str(f.actions)}{guard_str(f.guard)} " + go(f.f, 2)
            return f"({s})" if prec >= 2 else s
        if isinstance(f, Eu):
            return f"E({go(f.left, 0)} U {go(f.right, 0)})"
        if isinstance(f, AndF):
            # the right operand is rendered one level tighter so that the
            # left-associative parse rebuilds the exact tree shape
            s = go(f.left, 1) + " & " + go(f.right, 2)
            return f"({s})" if prec >= 2 else s
        if isinstance(f, OrF):
            s = go(f.left, 0) + " | " + go(f.right, 1)
            return f"({s})" if prec >= 1 else s
        raise TypeError(f"not a formula: {f!r}")

    return go(f, 0)


# -- valuations and finite transition systems --------------------------------


def parse_valuation(text: str) -> Valuation:
    """Comma-separated assignments, e.g. ``x=3, y=0``."""
    out: Valuation = {}
    ts = _Stream(tokenize(text))
    while ts.peek().kind != "eof":
        name = ts.next()
        if name.kind != "name":
            raise ParseError(f"expected a variable, found {name.text!r}",
                             name.line, name.col)
        ts.expect("=")
        val = ts.next()
        if val.kind != "num":
            raise ParseError(f"expected an integer, found {val.text!r}",
                             val.line, val.col)
        out[name.text] = int(val.text)
        if ts.peek().kind != "eof":
            ts.expect(",")
    return out


def serialize_valuation(v: Valuation) -> str:
    return ", ".join(f"{x}={v[x]}" for x in sorted(v))


_LTS_LINE = re.compile(r"^\s*(\w+)\s*-\s*(\w+)\s*->\s*(\w+)\s*$")


def parse_lts(text: str) -> FiniteLts:
    """One transition per line: ``s -a-> t``.  A line holding a single name
    declares an isolated state."""
    states: list[str] = []
    acts: list[str] = []
    transitions = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if re.fullmatch(r"\w+", line):
            if line not in states:
                states.append(line)
            continue
        m = _LTS_LINE.match(line)
        if m is None:
            raise ParseError(f"bad transition line {line!r}", ln, 1)
        s, a, t = m.groups()
        for st in (s, t):
            if st not in states:
                states.append(st)
        if a not in acts:
            acts.append(a)
        transitions.add((s, a, t))
    return FiniteLts(tuple(states), tuple(acts), frozenset(transitions))


def serialize_lts(l: FiniteLts) -> str:
    lines = [f"{s} -{a}-> {t}" for (s, a, t) in sorted(l.transitions)]
    mentioned = {s for (s, _, t) in l.transitions} | {t for (_, _, t) in l.transitions}
    lines += [s for s in l.states if s not in mentioned]
    return "\n".join(lines) + "\n"


# -- JSON for graphs and sets -------------------------------------------------


def _weight_to_json(w: float):
    if w == POS_INF:
        return "+inf"
    return int(w)


def mg_to_json(m: MonotonicityGraph) -> dict:
    """Nodes plus finite/+inf edges; -inf edges are omitted.  Valid edges
    between two constants and non-positive self-edges carry no information
    and are dropped."""
    ns = m.nodes()
    edges = []
    for i, x in enumerate(ns):
        for j, y in enumerate(ns):
            w = m.w[i, j]
            if w == NEG_INF:
                continue
            if is_const(x) and is_const(y) and w <= x - y:
                continue
            if i == j and w <= 0:
                continue
            edges.append({"from": x, "to": y, "weight": _weight_to_json(w)})
    return {"nodes": list(ns), "edges": edges}


def mg_from_json(doc: dict) -> MonotonicityGraph:
    nodes = [n if isinstance(n, str) else int(n) for n in doc["nodes"]]
    vars = tuple(n for n in nodes if isinstance(n, str) and not is_primed(n))
    consts = tuple(n for n in nodes if is_const(n))
    transitional = any(is_primed(n) for n in nodes)
    g = MonotonicityGraph(vars, consts, transitional)
    idx = g.index()
    w = np.full(g.w.shape, NEG_INF)
    for e in doc.get("edges", []):
        x = e["from"] if isinstance(e["from"], str) else int(e["from"])
        y = e["to"] if isinstance(e["to"], str) else int(e["to"])
        if x not in idx or y not in idx:
            raise ParseError(f"edge endpoint {x!r} or {y!r} is not a graph node")
        if e["weight"] == "-inf":
            continue
        wt = POS_INF if e["weight"] == "+inf" else float(int(e["weight"]))
        w[idx[x], idx[y]] = max(w[idx[x], idx[y]], wt)
    return g.with_weights(w)


def set_to_json(s: SymbolicSet) -> list:
    return [mg_to_json(m) for m in s.members]


def set_from_json(
    doc: list,
    vars: Optional[Iterable[str]] = None,
    consts: Optional[Iterable[int]] = None,
) -> SymbolicSet:
    """A symbolic set from a JSON array of graphs; the universe is taken from
    the graphs unless given explicitly (required for the empty set)."""
    members = [mg_from_json(d) for d in doc]
    if vars is None or consts is None:
        if not members:
            raise ParseError("an empty set document needs an explicit universe")
        vars, consts = members[0].vars, members[0].consts
    return make_set(vars, consts, members)


def dump_set(s: SymbolicSet) -> str:
    return json.dumps(set_to_json(s), indent=2)


# -- QBF text ------------------------------------------------------------------


def parse_qbf(text: str) -> Qbf:
    """Prenex QBF: quantifier prefix, a colon, then a boolean formula over
    ``&``, ``|``, ``!`` and parentheses, e.g. ``A x E y : x | !y``."""
    ts = _Stream(tokenize(text))
    prefix = []
    while ts.peek().text in ("A", "E"):
        q = ts.next().text
        v = ts.next()
        if v.kind != "name":
            raise ParseError(f"expected a variable after {q}, found {v.text!r}",
                             v.line, v.col)
        prefix.append((q, v.text))
    ts.expect(":")
    matrix = _parse_bool_or(ts)
    if ts.peek().kind != "eof":
        ts.fail(f"trailing input {ts.peek().text!r}")
    return Qbf(tuple(prefix), matrix)


def _parse_bool_or(ts: _Stream) -> BoolExpr:
    e = _parse_bool_and(ts)
    while ts.accept("|"):
        e = BOr(e, _parse_bool_and(ts))
    return e


def _parse_bool_and(ts: _Stream) -> BoolExpr:
    e = _parse_bool_atom(ts)
    while ts.accept("&"):
        e = BAnd(e, _parse_bool_atom(ts))
    return e


def _parse_bool_atom(ts: _Stream) -> BoolExpr:
    if ts.accept("!"):
        return BNot(_parse_bool_atom(ts))
    if ts.accept("("):
        e = _parse_bool_or(ts)
        ts.expect(")")
        return e
    t = ts.next()
    if t.kind != "name":
        raise ParseError(f"expected a boolean variable, found {t.text!r}",
                         t.line, t.col)
    return BVar(t.text)


def serialize_qbf(q: Qbf) -> str:
    def go(e: BoolExpr, prec: int) -> str:
        if isinstance(e, BVar):
            return e.name
        if isinstance(e, BNot):
            return "!" + go(e.f, 2)
        if isinstance(e, BAnd):
            # right operand one level tighter: the parser is left-associative
            s = go(e.left, 1) + " & " + go(e.right, 2)
            return f"({s})" if prec >= 2 else s
        if isinstance(e, BOr):
            s = go(e.left, 0) + " | " + go(e.right, 1)
            return f"({s})" if prec >= 1 else s
        raise TypeError(f"not a boolean expression: {e!r}")

    prefix = " ".join(f"{q_} {v}" for q_, v in q.prefix)
    return f"{prefix} : {go(q.matrix, 0)}".strip()
