"""Monotonicity graphs: weighted constraint graphs over variables and constants.

A monotonicity graph (MG) encodes a conjunction of gap clauses ``x - y >= k``
as a complete weighted digraph: the weight of the edge (x, y) is the largest
offset k demanded between x and y, or -inf when the pair is unconstrained.
Weights live in Z extended with -inf and +inf; a +inf weight (or a cycle of
positive total weight) makes the graph unsatisfiable.

Node universe and ordering are canonical: unprimed variables sorted by name,
then their primed copies (for transitional graphs), then constants sorted by
value.  All operations are pure; graphs are never mutated after construction.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Optional, Union

import numpy as np

NEG_INF = float("-inf")
POS_INF = float("inf")

Node = Union[str, int]


class Clause(NamedTuple):
    """A gap clause ``left - right >= k``; endpoints are variable names
    (primed names end with an apostrophe) or integer constants."""

    left: Node
    right: Node
    k: int

    def is_positive(self) -> bool:
        return self.k >= 0

    def negated(self) -> "Clause":
        # not(x - y >= k)  <=>  y - x >= -k + 1
        return Clause(self.right, self.left, -self.k + 1)


def prime(name: str) -> str:
    return name + "'"


def is_primed(node: Node) -> bool:
    return isinstance(node, str) and node.endswith("'")


def unprime(name: str) -> str:
    return name[:-1] if name.endswith("'") else name


def is_const(node: Node) -> bool:
    return isinstance(node, int)


class UnsatisfiableGraphError(ValueError):
    """Raised when an operation requires a satisfiable graph."""


try:  # hot loops are compiled when numba is available; numpy otherwise
    from numba import njit

    @njit(cache=True)
    def _fw_inplace_abort(w):  # pragma: no cover - compiled
        """Max-plus Floyd-Warshall on a matrix without +inf entries;
        returns True (and stops) when a positive-weight cycle appears."""
        n = w.shape[0]
        for k in range(n):
            for i in range(n):
                wik = w[i, k]
                if wik == -np.inf:
                    continue
                for j in range(n):
                    c = wik + w[k, j]
                    if c > w[i, j]:
                        w[i, j] = c
            for i in range(n):
                if w[i, i] > 0:
                    return True
        return False

    @njit(cache=True)
    def _fw_inplace(w):  # pragma: no cover - compiled
        """Max-plus Floyd-Warshall on a matrix without +inf entries."""
        n = w.shape[0]
        for k in range(n):
            for i in range(n):
                wik = w[i, k]
                if wik == -np.inf:
                    continue
                for j in range(n):
                    c = wik + w[k, j]
                    if c > w[i, j]:
                        w[i, j] = c

    @njit(cache=True)
    def _fw_batch(ws):  # pragma: no cover - compiled
        """Close a stack of matrices in place; out[t] is False when matrix t
        develops a positive-weight cycle (left partially closed then)."""
        r, n = ws.shape[0], ws.shape[1]
        out = np.empty(r, dtype=np.bool_)
        for t in range(r):
            w = ws[t]
            sat = True
            for k in range(n):
                for i in range(n):
                    wik = w[i, k]
                    if wik == -np.inf:
                        continue
                    for j in range(n):
                        c = wik + w[k, j]
                        if c > w[i, j]:
                            w[i, j] = c
                for i in range(n):
                    if w[i, i] > 0:
                        sat = False
                        break
                if not sat:
                    break
            out[t] = sat
        return out

except ImportError:  # pragma: no cover

    def _fw_inplace_abort(w):
        n = w.shape[0]
        for k in range(n):
            np.maximum(w, w[:, k : k + 1] + w[k : k + 1, :], out=w)
            if (np.diagonal(w) > 0).any():
                return True
        return False

    def _fw_inplace(w):
        n = w.shape[0]
        for k in range(n):
            np.maximum(w, w[:, k : k + 1] + w[k : k + 1, :], out=w)

    def _fw_batch(ws):
        return np.array([not _fw_inplace_abort(w) for w in ws], dtype=bool)


def _madd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Max-plus addition of weight matrices; -inf + +inf is -inf
    (a path through an unreachable segment contributes no constraint)."""
    with np.errstate(invalid="ignore"):
        out = a + b
    nan = np.isnan(out)
    if nan.any():
        out[nan] = NEG_INF
    return out


# per-universe caches of the constant-seeding matrix and the constraint mask;
# universes in one run are few while graphs number in the thousands
_SEED_CACHE: dict = {}
_MASK_CACHE: dict = {}
_PROJ_CACHE: dict = {}
_UNSAT_CACHE: dict = {}


class MonotonicityGraph:
    """Immutable weighted digraph over Var (∪ Var') ∪ Const."""

    __slots__ = ("vars", "consts", "transitional", "w", "closed", "_nodes")

    def __init__(
        self,
        vars: Iterable[str],
        consts: Iterable[int],
        transitional: bool = False,
        w: Optional[np.ndarray] = None,
        closed: bool = False,
    ):
        self.vars = tuple(sorted(set(vars)))
        self.consts = tuple(sorted(set(consts)))
        self.transitional = transitional
        self._nodes = None
        n = len(self.nodes())
        if w is None:
            w = np.full((n, n), NEG_INF)
        assert w.shape == (n, n)
        self.w = w
        self.w.setflags(write=False)
        self.closed = closed

    @classmethod
    def _make(cls, vars, consts, transitional, w, closed) -> "MonotonicityGraph":
        """Internal fast path: vars/consts must already be canonical tuples
        and w the matching freshly allocated matrix."""
        self = object.__new__(cls)
        self.vars = vars
        self.consts = consts
        self.transitional = transitional
        self._nodes = None
        self.w = w
        w.setflags(write=False)
        self.closed = closed
        return self

    def nodes(self) -> list[Node]:
        if self._nodes is None:
            ns: list[Node] = list(self.vars)
            if self.transitional:
                ns += [prime(v) for v in self.vars]
            ns += list(self.consts)
            self._nodes = ns
        return self._nodes

    def index(self) -> dict[Node, int]:
        return {n: i for i, n in enumerate(self.nodes())}

    def weight(self, x: Node, y: Node) -> float:
        idx = self.index()
        return float(self.w[idx[x], idx[y]])

    def edges(self) -> list[tuple[Node, Node, float]]:
        """All stored edges with weight > -inf, in canonical node order."""
        ns = self.nodes()
        out = []
        for i, x in enumerate(ns):
            for j, y in enumerate(ns):
                wv = self.w[i, j]
                if wv > NEG_INF:
                    out.append((x, y, float(wv)))
        return out

    # -- construction -----------------------------------------------------

    @classmethod
    def from_clauses(
        cls,
        clauses: Iterable[Clause],
        vars: Iterable[str],
        consts: Iterable[int],
        transitional: Optional[bool] = None,
    ) -> "MonotonicityGraph":
        clauses = list(clauses)
        if transitional is None:
            transitional = any(
                is_primed(c.left) or is_primed(c.right) for c in clauses
            )
        g = cls(vars, consts, transitional)
        idx = g.index()
        w = np.full(g.w.shape, NEG_INF)
        for c in clauses:
            for e in (c.left, c.right):
                if e not in idx:
                    raise ValueError(f"unknown variable or constant {e!r} in clause {c}")
            i, j = idx[c.left], idx[c.right]
            w[i, j] = max(w[i, j], c.k)
        return cls(g.vars, g.consts, transitional, w)

    def with_weights(self, w: np.ndarray, closed: bool = False) -> "MonotonicityGraph":
        return MonotonicityGraph(self.vars, self.consts, self.transitional, w, closed)

    # -- core algebra ------------------------------------------------------

    def _universe_key(self) -> tuple:
        return (self.vars, self.consts, self.transitional)

    def _seeded(self) -> np.ndarray:
        """Mutable weight copy with the implicit constant-difference edges
        c ->(c-d) d seeded for every ordered pair of distinct constants."""
        key = self._universe_key()
        seed = _SEED_CACHE.get(key)
        if seed is None:
            seed = np.full(self.w.shape, NEG_INF)
            ns = self.nodes()
            ci = [(i, x) for i, x in enumerate(ns) if is_const(x)]
            for i, x in ci:
                for j, y in ci:
                    if i != j:
                        seed[i, j] = x - y
            _SEED_CACHE[key] = seed
        return np.maximum(self.w, seed)

    def closure(self) -> "MonotonicityGraph":
        """Tightest path-derived weights (all-pairs max-plus), with implicit
        constant-difference edges seeded first and positive cycles promoted
        to +inf.  Idempotent; preserves Sat."""
        if self.closed:
            return self
        w = self._seeded()
        n = w.shape[0]
        if np.isposinf(w).any():
            for k in range(n):
                cand = _madd(w[:, k : k + 1], w[k : k + 1, :])
                np.maximum(w, cand, out=w)
        else:
            # no +inf anywhere, so no -inf + +inf cases can arise
            _fw_inplace(w)
        diag = np.diagonal(w)
        pos = diag > 0
        if pos.any():
            to_cyc = w[:, pos] > NEG_INF
            from_cyc = w[pos, :] > NEG_INF
            w[(to_cyc[:, :, None] & from_cyc[None, :, :]).any(axis=1)] = POS_INF
        return self.with_weights(w, closed=True)

    def closed_if_satisfiable(self) -> Optional["MonotonicityGraph"]:
        """closure(), or None as soon as unsatisfiability shows up (a +inf
        weight or a positive-weight cycle)."""
        if self.closed:
            return None if np.isposinf(self.w).any() else self
        w = self._seeded()
        if np.isposinf(w).any():
            return None
        if _fw_inplace_abort(w):
            return None
        return self.with_weights(w, closed=True)

    def is_satisfiable(self) -> bool:
        return not np.isposinf(self.closure().w).any()

    def _constraint_mask(self) -> np.ndarray:
        """True for node pairs that express constraints: everything except
        pairs of constants (implicit arithmetic facts)."""
        key = self._universe_key()
        mask = _MASK_CACHE.get(key)
        if mask is None:
            const = np.array([is_const(x) for x in self.nodes()])
            mask = ~(const[:, None] & const[None, :])
            _MASK_CACHE[key] = mask
        return mask

    def degree(self) -> int:
        """Magnitude of the most negative finite edge weight.  Edges between
        two constants are arithmetic facts, not constraints, and are ignored."""
        return self.stats()[0]

    def stats(self) -> tuple[int, int]:
        """(degree, norm) in one pass over the constraint entries."""
        w = self.w[self._constraint_mask()]
        finite = w[np.isfinite(w)]
        if finite.size == 0:
            return 0, 0
        mn = finite.min()
        degree = int(-mn) if mn < 0 else 0
        return degree, degree + int(max(finite.max(), 0)) + 1

    def restrict(self, keep: Iterable[str]) -> "MonotonicityGraph":
        """Maximal subgraph over ``keep`` ∪ Const (primed nodes dropped)."""
        keep = set(keep)
        if not keep <= set(self.vars):
            raise ValueError("restriction variables must be a subset of the graph's")
        ns = self.nodes()
        sel = [i for i, x in enumerate(ns) if is_const(x) or (not is_primed(x) and x in keep)]
        w = self.w[np.ix_(sel, sel)].copy()
        return MonotonicityGraph(sorted(keep), self.consts, False, w, self.closed)

    def project(self, keep: Iterable[str]) -> "MonotonicityGraph":
        """Restriction of the closure; keeps exactly the satisfying
        assignments of this graph restricted to ``keep``."""
        return self.closure().restrict(keep)

    def intersect(self, other: "MonotonicityGraph") -> "MonotonicityGraph":
        if self.nodes() != other.nodes():
            raise ValueError("intersection requires an identical node universe")
        return self.with_weights(np.maximum(self.w, other.w))

    def evaluate(self, valuation: Mapping[str, int]) -> bool:
        ns = self.nodes()
        vals = np.array(
            [x if is_const(x) else valuation[x] for x in ns], dtype=float
        )
        diff = vals[:, None] - vals[None, :]
        return bool((diff >= self.w).all())

    def norm(self) -> int:
        """Size measure used by runtime metrics: degree plus the largest
        non-negative finite weight plus one; 0 for an edgeless graph."""
        return self.stats()[1]

    # -- identity ----------------------------------------------------------

    def key(self) -> tuple:
        return (self.vars, self.consts, self.transitional, self.w.tobytes())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MonotonicityGraph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        es = ", ".join(
            f"{x}->{'+inf' if np.isposinf(k) else int(k)}->{y}" for x, y, k in self.edges()
        )
        tag = "closed " if self.closed else ""
        return f"<MG {tag}vars={self.vars} consts={self.consts} [{es}]>"


def from_constraint(
    clauses: Iterable[Clause],
    vars: Iterable[str],
    consts: Iterable[int],
    transitional: Optional[bool] = None,
) -> MonotonicityGraph:
    """The unique MG of a gap constraint: one edge per constrained pair,
    weight = the largest offset demanded for that pair."""
    return MonotonicityGraph.from_clauses(clauses, vars, consts, transitional)


def covers(n: MonotonicityGraph, m: MonotonicityGraph) -> bool:
    """True iff m covers n (n ⊑ m): every closure weight of n is at most the
    corresponding weight of m.  Implies Sat(n) ⊇ Sat(m)."""
    nc, mc = n.closure(), m.closure()
    if nc.nodes() != mc.nodes():
        raise ValueError("covering requires an identical node universe")
    return bool((nc.w <= mc.w).all())


def compose(g: MonotonicityGraph, m: MonotonicityGraph) -> MonotonicityGraph:
    """Predecessor constraint G∘M: rename m's variables to their primed
    copies, intersect with the transitional graph g, project onto the
    unprimed variables.  Satisfied exactly by the g-predecessors of Sat(m).

    The result of an unsatisfiable combination is returned as an explicitly
    unsatisfiable graph (satisfiability can be lost in the projected-away
    primed part, so it is checked before projecting)."""
    if not g.transitional or m.transitional:
        raise ValueError("compose expects a transitional g and a plain m")
    if g.vars != m.vars or g.consts != m.consts:
        raise ValueError("compose requires matching variables and constants")
    nv = len(g.vars)
    n = len(g.nodes())
    # m's node i (a variable) becomes primed slot nv + i; constants keep
    # their tail position, so m maps onto the contiguous block nv..n
    w = g._seeded()
    np.maximum(w[nv:, nv:], m.w, out=w[nv:, nv:])
    if w.max() == POS_INF or _fw_inplace_abort(w):
        return unsat_graph(g.vars, g.consts)
    key = (nv, n)
    sel = _PROJ_CACHE.get(key)
    if sel is None:
        sel = np.ix_(np.r_[0:nv, 2 * nv : n], np.r_[0:nv, 2 * nv : n])
        _PROJ_CACHE[key] = sel
    return MonotonicityGraph._make(g.vars, g.consts, False, w[sel], True)


def seeded_stack(rules: Iterable[MonotonicityGraph]) -> np.ndarray:
    """Stacked constant-seeded weight matrices of transitional graphs sharing
    one universe; precomputed input for compose_batch."""
    return np.stack([g._seeded() for g in rules])


def compose_batch(
    vars: tuple,
    consts: tuple,
    stack: np.ndarray,
    mw: np.ndarray,
) -> list[Optional[MonotonicityGraph]]:
    """compose(g, m) against every rule graph in one batched closure pass;
    unsatisfiable results come back as None.  All inputs must be satisfiable
    (guaranteed for rule graphs and canonical set members), so no +inf
    weights can occur."""
    r, n, _ = stack.shape
    nv = len(vars)
    batch = stack.copy()
    np.maximum(batch[:, nv:, nv:], mw, out=batch[:, nv:, nv:])
    sat = _fw_batch(batch)
    key = (nv, n)
    sel = _PROJ_CACHE.get(key)
    if sel is None:
        sel = np.ix_(np.r_[0:nv, 2 * nv : n], np.r_[0:nv, 2 * nv : n])
        _PROJ_CACHE[key] = sel
    return [
        MonotonicityGraph._make(vars, consts, False, batch[t][sel], True)
        if sat[t]
        else None
        for t in range(r)
    ]


def unsat_graph(vars: tuple, consts: tuple) -> MonotonicityGraph:
    """The canonical explicitly unsatisfiable plain graph of a universe
    (all weights +inf); one shared instance per universe."""
    key = (vars, consts)
    g = _UNSAT_CACHE.get(key)
    if g is None:
        n = len(vars) + len(consts)
        g = MonotonicityGraph(vars, consts, False, np.full((n, n), POS_INF), closed=True)
        _UNSAT_CACHE[key] = g
    return g


def canonicalize(m: MonotonicityGraph) -> MonotonicityGraph:
    """Closed canonical form; equal for any two graphs with the same closure."""
    c = m.closure()
    if np.isposinf(c.w).any():
        raise UnsatisfiableGraphError("cannot canonicalize an unsatisfiable graph")
    return c


def basis_clauses(m: MonotonicityGraph) -> list[Clause]:
    """A clause set with the same satisfying valuations as m, taken from the
    finite edges of the closure.  Edges between constants and non-positive
    self-edges are arithmetically valid and carry no constraint."""
    c = canonicalize(m)
    ns = c.nodes()
    out = []
    for i, x in enumerate(ns):
        for j, y in enumerate(ns):
            if i == j or (is_const(x) and is_const(y)):
                continue
            wv = c.w[i, j]
            if NEG_INF < wv:
                out.append(Clause(x, y, int(wv)))
    return out
