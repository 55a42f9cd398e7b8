"""Solver-independent model container: variables, linear constraints, objective.

Variables are identified by their insertion index; expressions keep
``{index: coefficient}`` maps so building large models stays cheap.
Comparison operators on expressions return :class:`Constraint` objects
that are registered with :meth:`ModelInstance.add_constr`.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..errors import EmissionError, ModelError

CONTINUOUS, BINARY, INTEGER = "continuous", "binary", "integer"
_KINDS = (CONTINUOUS, BINARY, INTEGER)
_NAME_OK = re.compile(r"[^A-Za-z0-9_.\-]")


def sanitize(label) -> str:
    return _NAME_OK.sub("_", str(label))


class Expr:
    __slots__ = ("terms", "const")

    def __init__(self, terms: dict | None = None, const: float = 0.0):
        self.terms = terms if terms is not None else {}
        self.const = float(const)

    @staticmethod
    def of(value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, Var):
            return Expr({value.index: 1.0})
        if isinstance(value, (int, float, np.floating, np.integer)):
            return Expr({}, float(value))
        raise TypeError(f"cannot use {type(value).__name__} in a linear expression")

    def copy(self) -> "Expr":
        return Expr(dict(self.terms), self.const)

    def add_term(self, var: "Var", coef: float) -> "Expr":
        """In-place accumulation; returns self for chaining."""
        if coef:
            self.terms[var.index] = self.terms.get(var.index, 0.0) + coef
        return self

    def iadd(self, other, scale: float = 1.0) -> "Expr":
        other = Expr.of(other)
        for i, c in other.terms.items():
            self.terms[i] = self.terms.get(i, 0.0) + scale * c
        self.const += scale * other.const
        return self

    def __add__(self, other):
        return self.copy().iadd(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.copy().iadd(other, -1.0)

    def __rsub__(self, other):
        return Expr.of(other).copy().iadd(self, -1.0)

    def __neg__(self):
        return Expr({i: -c for i, c in self.terms.items()}, -self.const)

    def __mul__(self, k):
        if not isinstance(k, (int, float, np.floating, np.integer)):
            raise TypeError("expressions can only be scaled by numbers")
        k = float(k)
        return Expr({i: c * k for i, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / k)

    def __le__(self, other):
        return Constraint(self - other, "<=")

    def __ge__(self, other):
        return Constraint(self - other, ">=")

    def equals(self, other) -> "Constraint":
        return Constraint(self - other, "=")

    def value(self, x: Mapping[int, float] | np.ndarray) -> float:
        return self.const + sum(c * x[i] for i, c in self.terms.items())


@dataclass(frozen=True, eq=False)
class Var:
    index: int
    name: str
    kind: str
    lb: float
    ub: float

    def __hash__(self):
        return self.index

    def expr(self) -> Expr:
        return Expr({self.index: 1.0})

    def __add__(self, other):
        return self.expr() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self.expr() - other

    def __rsub__(self, other):
        return Expr.of(other) - self.expr()

    def __neg__(self):
        return Expr({self.index: -1.0})

    def __mul__(self, k):
        return self.expr() * k

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self.expr() / k

    def __le__(self, other):
        return self.expr() <= other

    def __ge__(self, other):
        return self.expr() >= other

    def equals(self, other) -> "Constraint":
        return self.expr().equals(other)

    @property
    def is_discrete(self) -> bool:
        return self.kind != CONTINUOUS


class Constraint:
    """``body sense 0`` where body carries the constant."""

    __slots__ = ("body", "sense")

    def __init__(self, body: Expr, sense: str):
        self.body = body
        self.sense = sense


@dataclass
class Row:
    name: str
    coefs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float


def quicksum(items: Iterable) -> Expr:
    out = Expr()
    for it in items:
        out.iadd(it)
    return out


@dataclass
class ModelInstance:
    name: str = "model"
    variables: list[Var] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    objective_terms: dict[str, Expr] = field(default_factory=dict)
    _by_name: dict[str, Var] = field(default_factory=dict, repr=False)
    _row_names: set = field(default_factory=set, repr=False)

    # ------------------------------------------------------------ building
    def add_var(self, name: str, kind: str = CONTINUOUS, lb: float = 0.0, ub: float = math.inf) -> Var:
        if kind not in _KINDS:
            raise ModelError(f"unknown variable kind {kind!r}")
        if name in self._by_name:
            raise EmissionError(f"duplicate variable name {name!r}")
        if kind == BINARY:
            lb, ub = max(lb, 0.0), min(ub, 1.0)
        if lb > ub + 1e-12:
            raise ModelError(f"variable {name}: lower bound {lb} exceeds upper bound {ub}")
        v = Var(len(self.variables), name, kind, float(lb), float(ub))
        self.variables.append(v)
        self._by_name[name] = v
        return v

    def var(self, name: str) -> Var:
        return self._by_name[name]

    def has_var(self, name: str) -> bool:
        return name in self._by_name

    def set_bounds(self, v: Var, lb: float | None = None, ub: float | None = None) -> Var:
        nv = Var(v.index, v.name, v.kind, v.lb if lb is None else float(lb), v.ub if ub is None else float(ub))
        if nv.lb > nv.ub + 1e-12:
            raise ModelError(f"variable {v.name}: empty bounds [{nv.lb}, {nv.ub}]")
        self.variables[v.index] = nv
        self._by_name[v.name] = nv
        return nv

    def fix(self, v: Var | str, value: float) -> Var:
        if isinstance(v, str):
            v = self._by_name[v]
        return self.set_bounds(v, value, value)

    def add_constr(self, name: str, con: Constraint) -> Row:
        if not isinstance(con, Constraint):
            raise ModelError(f"constraint {name}: expected a comparison, got {type(con).__name__}")
        if name in self._row_names:
            raise EmissionError(f"duplicate constraint name {name!r}")
        n = len(self.variables)
        coefs = []
        for i, c in con.body.terms.items():
            if not 0 <= i < n:
                raise ModelError(f"constraint {name} references an undeclared variable")
            if c != 0.0:
                coefs.append((i, c))
        row = Row(name, tuple(coefs), con.sense, -con.body.const)
        self.rows.append(row)
        self._row_names.add(name)
        return row

    def add_objective(self, term: str, expr) -> None:
        self.objective_terms.setdefault(term, Expr()).iadd(expr)

    # ------------------------------------------------------------ queries
    def objective(self) -> Expr:
        return quicksum(self.objective_terms.values())

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_discrete(self) -> int:
        return sum(1 for v in self.variables if v.is_discrete)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def count_by_prefix(self, discrete_only: bool = False) -> Counter:
        """Variable counts keyed by the name stem before the first ``__``."""
        return Counter(v.name.split("__", 1)[0] for v in self.variables if v.is_discrete or not discrete_only)

    def rows_with_prefix(self, prefix: str) -> list[Row]:
        return [r for r in self.rows if r.name.split("__", 1)[0] == prefix]

    def as_matrices(self):
        """Dense arrays for scipy: c, A_ub, b_ub, A_eq, b_eq, bounds, integrality.

        ``>=`` rows are negated into ``<=`` form. Meant for small oracle checks.
        """
        n = self.n_vars
        c = np.zeros(n)
        obj = self.objective()
        for i, v in obj.terms.items():
            c[i] = v
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for r in self.rows:
            a = np.zeros(n)
            for i, v in r.coefs:
                a[i] = v
            if r.sense == "<=":
                ub_rows.append(a)
                ub_rhs.append(r.rhs)
            elif r.sense == ">=":
                ub_rows.append(-a)
                ub_rhs.append(-r.rhs)
            else:
                eq_rows.append(a)
                eq_rhs.append(r.rhs)
        bounds = [(None if math.isinf(v.lb) else v.lb, None if math.isinf(v.ub) else v.ub) for v in self.variables]
        integrality = np.array([1 if v.is_discrete else 0 for v in self.variables])
        A_ub = np.array(ub_rows) if ub_rows else np.zeros((0, n))
        A_eq = np.array(eq_rows) if eq_rows else np.zeros((0, n))
        return c, A_ub, np.array(ub_rhs), A_eq, np.array(eq_rhs), bounds, integrality, obj.const

    def row_activity(self, row: Row, values: Mapping[str, float]) -> float:
        return sum(c * values[self.variables[i].name] for i, c in row.coefs)

    def row_residual(self, row: Row, values: Mapping[str, float]) -> float:
        """Amount by which ``row`` is violated (0 when satisfied)."""
        a = self.row_activity(row, values)
        if row.sense == "<=":
            return max(0.0, a - row.rhs)
        if row.sense == ">=":
            return max(0.0, row.rhs - a)
        return abs(a - row.rhs)

    def evaluate(self, expr: Expr, values: Mapping[str, float]) -> float:
        return expr.const + sum(c * values[self.variables[i].name] for i, c in expr.terms.items())

    def term_values(self, values: Mapping[str, float]) -> dict[str, float]:
        return {t: self.evaluate(e, values) for t, e in self.objective_terms.items()}


SOLVED_STATUSES = ("optimal", "gap_reached")


@dataclass
class Solution:
    status: str
    objective: float | None = None
    gap: float | None = None
    values: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    log: str = ""

    @property
    def ok(self) -> bool:
        return self.status in SOLVED_STATUSES

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def get(self, name: str, default: float = 0.0) -> float:
        return self.values.get(name, default)

    def max_bound_violation(self, model: ModelInstance) -> float:
        worst = 0.0
        for v in model.variables:
            x = self.values.get(v.name)
            if x is None:
                continue
            worst = max(worst, v.lb - x, x - v.ub)
        return worst
