"""Assembly of the full planning / operation model."""

from __future__ import annotations

from ..backend.model import ModelInstance
from ..errors import ConfigError
from ..system import EnergySystem, ScenarioConfig
from ..temporal import TemporalStructure
from . import energy, gasnet, hydrogen
from .builder import COST_TERMS, INVEST_STEMS, OTHER_TERM, Builder, fix_investments, investment_names


def build_model(system: EnergySystem, ts: TemporalStructure, cfg: ScenarioConfig,
                fixed: dict[str, float] | None = None, name: str | None = None) -> Builder:
    """Build the model for ``cfg.flow_formulation``.

    ``fixed`` maps investment variable names to values; in ``operate_fixed``
    mode every investment variable must be present.
    """
    if cfg.mode == "operate_fixed" and fixed is None:
        raise ConfigError("operate_fixed mode needs the investment values to fix")
    b = Builder(system, ts, cfg, ModelInstance(name or f"h2blend_{cfg.flow_formulation}"))
    energy.add_investment_bounds(b)
    energy.add_objective(b)
    energy.add_non_supplied_bounds(b)
    energy.add_gas_wells(b)
    energy.add_demand_blending(b)
    energy.add_gas_thermals(b)
    energy.add_other_thermals(b)
    energy.add_power_lite(b)
    hydrogen.add_electrolyzers(b)
    hydrogen.add_smr(b)
    hydrogen.add_fuel_cells(b)
    hydrogen.add_h2_storage(b)
    hydrogen.add_ng_storage(b)
    gasnet.add_network(b)
    energy.add_policy(b)
    energy.add_power_balance(b)
    gasnet.add_balances(b)
    if fixed is not None:
        fix_investments(b.model, fixed, require_all=cfg.mode == "operate_fixed")
    return b


__all__ = [
    "COST_TERMS", "INVEST_STEMS", "OTHER_TERM", "Builder", "build_model", "energy", "fix_investments",
    "gasnet", "hydrogen", "investment_names",
]
