"""Feedback Vertex Set in subexponential parameterized time on nice graph classes."""

from .graph import Graph, GraphInputError, RuleInapplicable, find_cycle, has_cycle, is_fvs
from .instance import AnnInstance, InstanceError, is_solution
from .params import PSEUDO_DISK, NiceClassParams, Thresholds, derive_thresholds, preset, s_string
from .solver import SolveResult, SolverContext, algorithm_a, solve

__all__ = [
    "AnnInstance",
    "Graph",
    "GraphInputError",
    "InstanceError",
    "NiceClassParams",
    "PSEUDO_DISK",
    "RuleInapplicable",
    "SolveResult",
    "SolverContext",
    "Thresholds",
    "algorithm_a",
    "derive_thresholds",
    "find_cycle",
    "has_cycle",
    "is_fvs",
    "is_solution",
    "preset",
    "s_string",
    "solve",
]

__version__ = "0.1.0"
