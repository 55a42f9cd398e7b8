"""Optimization model container, file writers and solver drivers."""

from .model import BINARY, CONTINUOUS, INTEGER, Constraint, Expr, ModelInstance, Solution, Var, quicksum, sanitize
from .solvers import available_drivers, solve, solve_file
from .writers import emit, to_lp, to_mps

__all__ = [
    "BINARY", "CONTINUOUS", "INTEGER", "Constraint", "Expr", "ModelInstance", "Solution", "Var",
    "available_drivers", "emit", "quicksum", "sanitize", "solve", "solve_file", "to_lp", "to_mps",
]
