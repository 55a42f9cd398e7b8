"""Shared state for assembling one optimization model.

The sector modules (``energy``, ``hydrogen``, ``gasnet``) only declare
variables and rows through a :class:`Builder`; nodal balances are
accumulated here and written once every contribution is known.

Naming scheme: ``<stem>__<rpNN>__<kNN>__<entity>`` for operational
variables, ``<stem>__<rpNN>__<entity>`` for per-representative-period
ones, ``<stem>__<pNNN>__<entity>`` for inter-period storage levels and
``<stem>__<entity>`` for investments.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from ..backend.model import BINARY, CONTINUOUS, INTEGER, Expr, ModelInstance, Var, sanitize
from ..errors import AuditError, ConfigError
from ..system import EnergySystem, ScenarioConfig
from ..temporal import TemporalStructure

# objective terms, in the order of the cost function
COST_TERMS = (
    "gas_supply",
    "gas_thermal_om",
    "other_thermal_ops",
    "renewable_om",
    "storage_om",
    "ens",
    "h2ns_ch4ns",
    "co2_other_thermal",
    "co2_gas_thermal",
    "co2_industry",
    "gen_invest",
    "line_invest",
    "h2_invest",
    "h2_om",
    "ng_invest",
    "ng_om",
    "pipe_invest",
)
# extension point for costs outside the modeled sectors; contributes nothing here
OTHER_TERM = "other"

INVEST_STEMS = ("x", "xh2", "xch4", "xline", "xpipe")


def _width(n: int) -> int:
    return max(2, len(str(n)))


@dataclass
class Builder:
    system: EnergySystem
    ts: TemporalStructure
    cfg: ScenarioConfig
    model: ModelInstance = field(default_factory=ModelInstance)
    big_m: float = 0.0
    _vars: dict = field(default_factory=dict)
    balances: dict = field(default_factory=lambda: {"power": defaultdict(Expr), "h2": defaultdict(Expr), "ch4": defaultdict(Expr)})

    def __post_init__(self):
        if self.cfg.mow is not None and self.cfg.mow != self.ts.mow:
            self.ts = self.ts.with_mow(self.cfg.mow)
        self.big_m = self.cfg.resolved_big_m(self.system)
        rw, kw = _width(len(self.ts.rep_periods)), _width(len(self.ts.sub_periods))
        self.rp_code = {rp: f"rp{i:0{rw}d}" for i, rp in enumerate(self.ts.rep_periods, start=1)}
        self.k_code = {k: f"k{i:0{kw}d}" for i, k in enumerate(self.ts.sub_periods, start=1)}
        self.p_width = len(str(self.ts.n_periods))

    # ------------------------------------------------------------- naming
    def name(self, stem: str, entity, rp=None, k=None, p=None) -> str:
        parts = [stem]
        if p is not None:
            parts.append(f"p{p:0{self.p_width}d}")
        if rp is not None:
            parts.append(self.rp_code[rp])
        if k is not None:
            parts.append(self.k_code[k])
        parts.append(sanitize(entity))
        return "__".join(parts)

    def new(self, stem: str, entity, rp=None, k=None, p=None, kind: str = CONTINUOUS,
            lb: float = 0.0, ub: float = math.inf) -> Var:
        v = self.model.add_var(self.name(stem, entity, rp, k, p), kind, lb, ub)
        self._vars[(stem, entity, rp, k, p)] = v
        return v

    def v(self, stem: str, entity, rp=None, k=None, p=None) -> Var:
        return self._vars[(stem, entity, rp, k, p)]

    def items(self, stem: str):
        """``(entity, rp, k, p, var)`` for every variable declared under ``stem``."""
        for (st, ent, rp, k, p), var in self._vars.items():
            if st == stem:
                yield ent, rp, k, p, var

    def has(self, stem: str, entity, rp=None, k=None, p=None) -> bool:
        return (stem, entity, rp, k, p) in self._vars

    def row(self, stem: str, entity, con, rp=None, k=None, p=None):
        return self.model.add_constr(self.name(stem, entity, rp, k, p), con)

    def steps(self):
        return self.ts.steps()

    def weight(self, rp, k) -> float:
        return self.ts.weight(rp, k)

    def w_k(self, k) -> float:
        return float(self.ts.w_k[k])

    # ------------------------------------------------------------- capacity
    def invest_var(self, unit) -> Var:
        stem = invest_stem(unit.kind)
        return self.v(stem, unit.id)

    def units_built(self, unit) -> Expr:
        """``x + EU`` for a unit."""
        return self.invest_var(unit) + unit.eu

    # ------------------------------------------------------------- balances
    def supply(self, carrier: str, key, expr, scale: float = 1.0) -> None:
        self.balances[carrier][key].iadd(expr, scale)

    def withdraw(self, carrier: str, key, expr, scale: float = 1.0) -> None:
        self.balances[carrier][key].iadd(expr, -scale)

    def price(self, attr: str) -> float:
        value = getattr(self.cfg, attr)
        if value is None:
            raise ConfigError(f"{attr} is not set but the system has units that need it")
        return value


def invest_stem(kind: str) -> str:
    if kind in ("gas_well", "ng_storage"):
        return "xch4"
    if kind in ("electrolyzer", "smr_ccs", "fuel_cell", "h2_tank", "h2_cavern"):
        return "xh2"
    return "x"


def investment_names(model: ModelInstance) -> list[str]:
    return [v.name for v in model.variables if v.name.split("__", 1)[0] in INVEST_STEMS]


def fix_investments(model: ModelInstance, plan: dict[str, float], require_all: bool = True) -> None:
    """Fix every investment variable to its planned value.

    Planned values are rounded to the nearest integer for discrete
    variables and clipped into the variable bounds.
    """
    for name in investment_names(model):
        if name not in plan:
            if require_all:
                raise AuditError(f"plan has no value for investment variable {name}")
            continue
        var = model.var(name)
        value = plan[name]
        if var.kind in (BINARY, INTEGER):
            value = float(round(value))
        value = min(max(value, var.lb), var.ub)
        model.fix(var, value)
