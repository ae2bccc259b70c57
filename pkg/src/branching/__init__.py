"""Generic branch-and-prune constraint solving over pluggable domains."""
from .constraints import CSPInstance, Variable
from .costs import CostOrdering, CostSpec, classical_spec, cost_improves, eval_cost
from .engine import SolverConfig, SolveResult, branch, solve, solve_real
from .filtering import FilteringKind
from .model import format_model, load_model, parse_model
from .precision import TOP, Precision, Stack, Store, stack_covers, store_leq

__all__ = [
    "CSPInstance",
    "CostOrdering",
    "CostSpec",
    "FilteringKind",
    "Precision",
    "SolveResult",
    "SolverConfig",
    "Stack",
    "Store",
    "TOP",
    "Variable",
    "branch",
    "classical_spec",
    "cost_improves",
    "eval_cost",
    "format_model",
    "load_model",
    "parse_model",
    "solve",
    "solve_real",
    "stack_covers",
    "store_leq",
]
