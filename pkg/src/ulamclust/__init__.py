"""Exact k-center and k-median clustering of permutations under the Ulam metric."""

from .errors import ConfigError, GuardError, InputError, UlamError, WorkWarning
from .kcenter import ColoringFamilyConfig, KCenterResult, coloring_family, guide_set, solve_kcenter
from .kmedian import KMedianResult, kernelize, solve_kmedian, xp_solve
from .permcore import (Instance, Permutation, SymbolTable, apply_move, distance_at_most,
                       lcs_length, permutation_graph, ulam_distance)

__all__ = [
    "ColoringFamilyConfig", "ConfigError", "GuardError", "Instance", "InputError",
    "KCenterResult", "KMedianResult", "Permutation", "SymbolTable", "UlamError", "WorkWarning",
    "apply_move", "coloring_family", "distance_at_most", "guide_set", "kernelize",
    "lcs_length", "permutation_graph", "solve_kcenter", "solve_kmedian", "ulam_distance",
    "xp_solve",
]
