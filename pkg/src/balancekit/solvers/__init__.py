"""Exact and heuristic solvers for correlation clustering (CC) and its relaxed variant (RCC)."""
from .config import CC, RCC, SolveResult, SolverConfig
from .exact import brute_force_cc, exact_cc, restricted_growth_strings
from .ils import ils_cc, ils_rcc, k_sweep

__all__ = [
    "CC", "RCC", "SolveResult", "SolverConfig",
    "brute_force_cc", "exact_cc", "restricted_growth_strings",
    "ils_cc", "ils_rcc", "k_sweep",
]
