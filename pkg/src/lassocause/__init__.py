"""Causality classes for LTL counterexamples, expressed in Event Order Logic."""

from .causality import check_ac, compute_causes
from .eol import eval_infinite, parse_eol
from .ltl import eval_ltl, parse_ltl
from .model import Lasso, TransitionSystem, parse_model
from .search import enumerate_lassos, partition

__all__ = [
    "Lasso", "TransitionSystem", "check_ac", "compute_causes", "enumerate_lassos",
    "eval_infinite", "eval_ltl", "parse_eol", "parse_ltl", "parse_model", "partition",
]
