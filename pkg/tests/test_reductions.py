"""QBF -> boolean program -> system reduction."""

import itertools
import random

from gapmc import logic
from gapmc.gcs import validate
from gapmc.oracle import qbf_eval
from gapmc.reductions import (
    BAnd,
    BNot,
    BOr,
    BVar,
    BooleanProgram,
    Qbf,
    _guard_disjuncts,
    program_step,
    qbf_to_boolean_program,
    qbf_to_gcs,
)


def random_bool_expr(rng, names, depth):
    if depth == 0 or rng.random() < 0.3:
        return BVar(rng.choice(names))
    kind = rng.choice(["not", "and", "or"])
    if kind == "not":
        return BNot(random_bool_expr(rng, names, depth - 1))
    cls = BAnd if kind == "and" else BOr
    return cls(random_bool_expr(rng, names, depth - 1), random_bool_expr(rng, names, depth - 1))


def eval_expr(e, env):
    if isinstance(e, BVar):
        return bool(env[e.name])
    if isinstance(e, BNot):
        return not eval_expr(e.f, env)
    if isinstance(e, BAnd):
        return eval_expr(e.left, env) and eval_expr(e.right, env)
    if isinstance(e, BOr):
        return eval_expr(e.left, env) or eval_expr(e.right, env)
    raise TypeError(e)


def program_reaches(p: BooleanProgram, start: str, env: dict, target: str) -> bool:
    """Explicit BFS over the (finite) program configuration graph."""
    seen = {(start, tuple(sorted(env.items())))}
    frontier = [(start, env)]
    while frontier:
        s, e = frontier.pop()
        if s == target:
            return True
        for (t, e2) in program_step(p, s, e):
            key = (t, tuple(sorted(e2.items())))
            if key not in seen:
                seen.add(key)
                frontier.append((t, e2))
    return False


def initial_env(p: BooleanProgram) -> dict:
    return {v: 0 for v in p.variables}


# -- qbf evaluation oracle sanity -------------------------------------------------


def test_qbf_eval_basics():
    x = BVar("x")
    assert qbf_eval(Qbf((("E", "x"),), x))
    assert not qbf_eval(Qbf((("A", "x"),), x))
    iff = BOr(BAnd(BVar("x"), BVar("y")), BAnd(BNot(BVar("x")), BNot(BVar("y"))))
    assert qbf_eval(Qbf((("A", "x"), ("E", "y")), iff))
    assert not qbf_eval(Qbf((("E", "x"), ("A", "y")), iff))


# -- program level ------------------------------------------------------------------


def test_program_exists_x():
    q = Qbf((("E", "x"),), BVar("x"))
    p, start, target = qbf_to_boolean_program(q)
    assert program_reaches(p, start, initial_env(p), target)


def test_program_forall_x():
    q = Qbf((("A", "x"),), BVar("x"))
    p, start, target = qbf_to_boolean_program(q)
    assert not program_reaches(p, start, initial_env(p), target)


def test_program_forall_exists_iff():
    iff = BOr(BAnd(BVar("x"), BVar("y")), BAnd(BNot(BVar("x")), BNot(BVar("y"))))
    q = Qbf((("A", "x"), ("E", "y")), iff)
    p, start, target = qbf_to_boolean_program(q)
    assert program_reaches(p, start, initial_env(p), target)


def test_program_exists_forall_iff_false():
    iff = BOr(BAnd(BVar("x"), BVar("y")), BAnd(BNot(BVar("x")), BNot(BVar("y"))))
    q = Qbf((("E", "x"), ("A", "y")), iff)
    p, start, target = qbf_to_boolean_program(q)
    assert not program_reaches(p, start, initial_env(p), target)


def test_program_differential_vs_qbf_eval():
    rng = random.Random(61)
    for _ in range(300):
        n = rng.randint(1, 3)
        names = [f"x{i}" for i in range(1, n + 1)]
        prefix = tuple((rng.choice("AE"), v) for v in names)
        q = Qbf(prefix, random_bool_expr(rng, names, rng.randint(1, 3)))
        p, start, target = qbf_to_boolean_program(q)
        assert program_reaches(p, start, initial_env(p), target) == qbf_eval(q)


# -- guard compilation -----------------------------------------------------------------


def test_guard_disjuncts_truth_tables():
    rng = random.Random(62)
    names = ["x", "y", "z"]
    for _ in range(300):
        e = random_bool_expr(rng, names, rng.randint(1, 4))
        disjuncts = _guard_disjuncts(e)
        for bits in itertools.product((0, 1), repeat=3):
            env = dict(zip(names, bits))
            via_dnf = any(
                all(env[v] == b for v, b in d.items()) for d in disjuncts
            )
            assert via_dnf == eval_expr(e, env)


def test_guard_disjuncts_none_is_single_empty():
    assert _guard_disjuncts(None) == [{}]


# -- gcs level ----------------------------------------------------------------------------


def test_gcs_end_to_end_examples():
    x = BVar("x")
    iff = BOr(BAnd(BVar("x"), BVar("y")), BAnd(BNot(BVar("x")), BNot(BVar("y"))))
    cases = [
        (Qbf((("E", "x"),), x), True),
        (Qbf((("A", "x"),), x), False),
        (Qbf((("A", "x"), ("A", "y")), BOr(BVar("x"), BVar("y"))), False),
        (Qbf((("A", "x"), ("E", "y")), iff), True),
        (Qbf((("E", "x"), ("A", "y")), iff), False),
    ]
    for q, expect in cases:
        g, v0, f = qbf_to_gcs(q)
        assert validate(g) == []
        assert logic.check(g, v0, f) == expect


def test_gcs_random_differential():
    rng = random.Random(63)
    for _ in range(40):
        n = rng.randint(1, 3)
        names = [f"x{i}" for i in range(1, n + 1)]
        prefix = tuple((rng.choice("AE"), v) for v in names)
        q = Qbf(prefix, random_bool_expr(rng, names, rng.randint(1, 3)))
        g, v0, f = qbf_to_gcs(q)
        assert logic.check(g, v0, f) == qbf_eval(q)


def test_gcs_instances_are_window_closed():
    from gapmc.oracle import window_closed

    q = Qbf((("A", "x"), ("E", "y")), BOr(BVar("x"), BNot(BVar("y"))))
    g, v0, _ = qbf_to_gcs(q)
    n_states = max(g.consts)
    cert = window_closed(g, 0, n_states)
    assert cert.ok, cert.violation
    assert all(0 <= val <= n_states for val in v0.values())
