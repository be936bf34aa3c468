"""Hardness-instance generator: prenex QBF -> boolean program -> GCS with a
reachability query.

The boolean program evaluates the QBF top down: the run verifies subformula
i between control states eval_i and out_i, deadlocking on failure.  Each
universal quantifier uses a flag variable to force both branches before
returning.  Boolean programs embed directly into gap-order systems: one
``state`` variable pinned to control-state indices, booleans pinned to
{0, 1}, guards compiled to a disjunction of literal conjunctions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .gcs import Gcs, TransitionRule, Valuation
from .logic import AndF, Atom, Ef, Formula
from .mg import Clause, prime

log = logging.getLogger(__name__)


# -- quantified boolean formulas --------------------------------------------


class BoolExpr:
    __slots__ = ()

    def eval(self, env: dict) -> bool:
        raise NotImplementedError

    def variables(self) -> set[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class BVar(BoolExpr):
    name: str

    def eval(self, env):
        return bool(env[self.name])

    def variables(self):
        return {self.name}


@dataclass(frozen=True)
class BNot(BoolExpr):
    f: BoolExpr

    def eval(self, env):
        return not self.f.eval(env)

    def variables(self):
        return self.f.variables()


@dataclass(frozen=True)
class BAnd(BoolExpr):
    left: BoolExpr
    right: BoolExpr

    def eval(self, env):
        return self.left.eval(env) and self.right.eval(env)

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class BOr(BoolExpr):
    left: BoolExpr
    right: BoolExpr

    def eval(self, env):
        return self.left.eval(env) or self.right.eval(env)

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Qbf:
    """Prenex form: quantifier prefix over all matrix variables."""

    prefix: tuple[tuple[str, str], ...]  # ("E"|"A", var)
    matrix: BoolExpr

    def __post_init__(self):
        bound = {v for _, v in self.prefix}
        free = self.matrix.variables() - bound
        if free:
            raise ValueError(f"matrix variables {sorted(free)} are not quantified")
        for q, _ in self.prefix:
            if q not in ("E", "A"):
                raise ValueError(f"unknown quantifier {q!r}")


# -- boolean programs --------------------------------------------------------


@dataclass(frozen=True)
class ProgramTransition:
    src: str
    guard: Optional[BoolExpr]  # None = unguarded
    assign: Optional[tuple[str, int]]  # (variable, 0|1); None = no change
    dst: str


@dataclass(frozen=True)
class BooleanProgram:
    states: tuple[str, ...]
    variables: tuple[str, ...]
    transitions: tuple[ProgramTransition, ...]


def program_step(p: BooleanProgram, state: str, env: dict) -> list[tuple[str, dict]]:
    """Explicit semantics, used as a test oracle for the GCS embedding."""
    out = []
    for t in p.transitions:
        if t.src != state:
            continue
        if t.guard is not None and not t.guard.eval(env):
            continue
        env2 = dict(env)
        if t.assign is not None:
            env2[t.assign[0]] = t.assign[1]
        out.append((t.dst, env2))
    return out


def qbf_to_boolean_program(q: Qbf) -> tuple[BooleanProgram, str, str]:
    """The top-down evaluation program; returns (program, start, target)."""
    k = len(q.prefix)
    states = [f"eval_{i}" for i in range(1, k + 2)] + [f"out_{i}" for i in range(1, k + 2)]
    variables = [v for _, v in q.prefix] + [f"y_{k + 1}"]
    transitions = [
        ProgramTransition(f"eval_{k + 1}", q.matrix, (f"y_{k + 1}", 1), f"out_{k + 1}")
    ]
    for i, (quant, x) in enumerate(q.prefix, start=1):
        if quant == "E":
            transitions += [
                ProgramTransition(f"eval_{i}", None, (x, 0), f"eval_{i + 1}"),
                ProgramTransition(f"eval_{i}", None, (x, 1), f"eval_{i + 1}"),
                ProgramTransition(f"out_{i + 1}", None, None, f"out_{i}"),
            ]
        else:
            y = f"y_{i}"
            variables.append(y)
            transitions += [
                # the flag selects the branch: both values must be verified in
                # order before the exit below unlocks
                ProgramTransition(f"eval_{i}", BNot(BVar(y)), (x, 0), f"eval_{i + 1}"),
                ProgramTransition(f"eval_{i}", BVar(y), (x, 1), f"eval_{i + 1}"),
                ProgramTransition(f"out_{i + 1}", BNot(BVar(y)), (y, 1), f"eval_{i}"),
                ProgramTransition(f"out_{i + 1}", BVar(y), (y, 0), f"out_{i}"),
            ]
    return (
        BooleanProgram(tuple(states), tuple(variables), tuple(transitions)),
        "eval_1",
        "out_1",
    )


def _dnf(e: BoolExpr, negate: bool = False) -> list[dict]:
    """Disjunctive normal form as a list of partial assignments (literal
    conjunctions).  Contradictory conjunctions are dropped."""
    if isinstance(e, BNot):
        return _dnf(e.f, not negate)
    if isinstance(e, BVar):
        return [{e.name: 0 if negate else 1}]
    if isinstance(e, (BAnd, BOr)):
        conjunctive = isinstance(e, BAnd) != negate  # De Morgan under negation
        left, right = _dnf(e.left, negate), _dnf(e.right, negate)
        if not conjunctive:
            return left + right
        out = []
        for a, b in product(left, right):
            if all(a.get(x, v) == v for x, v in b.items()):
                out.append({**a, **b})
        return out
    raise TypeError(f"not a boolean expression: {e!r}")


def _guard_disjuncts(guard: Optional[BoolExpr]) -> list[dict]:
    """Guard as a small disjunction of literal conjunctions: syntactic DNF
    with duplicates and absorbed (strictly weaker) disjuncts removed."""
    if guard is None:
        return [{}]
    disjuncts = _dnf(guard)
    kept: list[dict] = []
    for d in disjuncts:
        if any(all(d.get(x, None) == v for x, v in o.items()) for o in kept):
            continue  # d implies an already-kept disjunct
        kept = [o for o in kept if not all(o.get(x, None) == v for x, v in d.items())]
        kept.append(d)
    return sorted(kept, key=lambda d: sorted(d.items()))


def boolean_program_to_gcs(
    p: BooleanProgram, start: str, target: str
) -> tuple[Gcs, Valuation, Formula]:
    """Embed the program into a GCS: ``state`` carries the control state
    index, every boolean variable is framed or reassigned each step, and all
    successor values are explicitly bounded so the result is window-closed
    over [0, number of control states]."""
    index = {s: i + 1 for i, s in enumerate(p.states)}
    n = len(p.states)
    consts = tuple(sorted({0, 1} | set(range(1, n + 1))))
    rules = []
    for ti, t in enumerate(p.transitions):
        disjuncts = _guard_disjuncts(t.guard)
        if not disjuncts:
            log.warning("transition %s -> %s has an unsatisfiable guard; dropped",
                        t.src, t.dst)
        for di, env in enumerate(disjuncts):
            clauses = [
                Clause("state", index[t.src], 0),
                Clause(index[t.src], "state", 0),
                Clause(prime("state"), index[t.dst], 0),
                Clause(index[t.dst], prime("state"), 0),
            ]
            for x, b in sorted(env.items()):
                clauses.append(Clause(x, 1, 0) if b else Clause(0, x, 0))
            for x in p.variables:
                if t.assign is not None and x == t.assign[0]:
                    clauses.append(Clause(prime(x), t.assign[1], 0))
                    clauses.append(Clause(t.assign[1], prime(x), 0))
                else:
                    clauses.append(Clause(prime(x), x, 0))
                    clauses.append(Clause(x, prime(x), 0))
            # explicit window bounds for the syntactic closedness certificate
            for x in ("state",) + p.variables:
                clauses.append(Clause(prime(x), 0, 0))
                clauses.append(Clause(n, prime(x), 0))
            rules.append(TransitionRule(f"t{ti}_{di}", tuple(clauses), "step"))
    g = Gcs(("state",) + p.variables, consts, ("step",), tuple(rules))
    initial: Valuation = {"state": index[start], **{x: 0 for x in p.variables}}
    target_formula = Ef(
        AndF(Atom(Clause("state", index[target], 0)), Atom(Clause(index[target], "state", 0)))
    )
    return g, initial, target_formula


def qbf_to_gcs(q: Qbf) -> tuple[Gcs, Valuation, Formula]:
    """End to end: the QBF is true iff the target formula holds initially."""
    program, start, target = qbf_to_boolean_program(q)
    return boolean_program_to_gcs(program, start, target)
