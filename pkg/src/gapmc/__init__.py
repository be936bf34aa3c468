"""Symbolic EF model checking and bisimulation checking for gap-order
constraint systems."""

from .gcs import Gcs, TransitionRule, Valuation
from .mg import Clause, MonotonicityGraph
from .sets import Metrics, SymbolicSet

__all__ = [
    "Clause",
    "Gcs",
    "Metrics",
    "MonotonicityGraph",
    "SymbolicSet",
    "TransitionRule",
    "Valuation",
]
