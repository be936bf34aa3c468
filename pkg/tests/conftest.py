"""Shared fixtures: the lossy-countdown system and randomized generators."""

from __future__ import annotations

import random

import pytest

from gapmc.gcs import Gcs, TransitionRule
from gapmc.mg import Clause, MonotonicityGraph, from_constraint

# The lossy countdown: action a may drop x to any smaller non-negative value
# keeping y; action b decrements y (to any smaller non-negative value) while
# x may jump arbitrarily high.
CX_CLAUSES = (
    Clause("x", "x'", 1),
    Clause("y'", "y", 0),
    Clause("y", "y'", 0),
    Clause("x'", 0, 0),
)
CY_CLAUSES = (
    Clause("y", "y'", 1),
    Clause("x'", "x", 0),
    Clause("y'", 0, 0),
)


@pytest.fixture
def countdown() -> Gcs:
    return Gcs(
        vars=("x", "y"),
        consts=(0,),
        acts=("a", "b"),
        rules=(
            TransitionRule("CX", CX_CLAUSES, "a"),
            TransitionRule("CY", CY_CLAUSES, "b"),
        ),
    )


@pytest.fixture
def cx_graph() -> MonotonicityGraph:
    return from_constraint(CX_CLAUSES, ("x", "y"), (0,), transitional=True)


@pytest.fixture
def cy_graph() -> MonotonicityGraph:
    return from_constraint(CY_CLAUSES, ("x", "y"), (0,), transitional=True)


def random_plain_mg(
    rng: random.Random,
    vars=("x", "y"),
    consts=(0,),
    max_clauses: int = 4,
    lo_k: int = -3,
    hi_k: int = 3,
) -> MonotonicityGraph:
    """A random plain (non-transitional) graph; may be unsatisfiable."""
    terms = list(vars) + list(consts)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        a, b = rng.sample(terms, 2)
        clauses.append(Clause(a, b, rng.randint(lo_k, hi_k)))
    return from_constraint(clauses, vars, consts, transitional=False)


def random_transitional_mg(
    rng: random.Random,
    vars=("x", "y"),
    consts=(0,),
    max_clauses: int = 4,
    positive: bool = True,
) -> MonotonicityGraph:
    """A random transitional graph; positive=True keeps all offsets >= 0
    (degree 0), as system rules require."""
    terms = list(vars) + [v + "'" for v in vars] + list(consts)
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        a, b = rng.sample(terms, 2)
        k = rng.randint(0, 2) if positive else rng.randint(-3, 3)
        clauses.append(Clause(a, b, k))
    return from_constraint(clauses, vars, consts, transitional=True)


def random_valuation(rng: random.Random, vars, lo: int = -6, hi: int = 8) -> dict:
    return {x: rng.randint(lo, hi) for x in vars}
