"""Cost function, generic bounds, gas wells, demand-side blending, gas-fired
thermals, the renewable-share policy and a compact DC power sector."""

from __future__ import annotations

import math

from ..backend.model import BINARY, CONTINUOUS, INTEGER, Expr
from .builder import COST_TERMS, OTHER_TERM, Builder, invest_stem

POWER_INVEST_KINDS = ("thermal_gas", "thermal_other", "renewable", "bess")
H2_UNIT_KINDS = ("electrolyzer", "smr_ccs", "fuel_cell", "h2_tank", "h2_cavern")
NG_UNIT_KINDS = ("gas_well", "ng_storage")


def _invest_kind(b: Builder, unit) -> str:
    if unit.kind in b.cfg.continuous_invest:
        return CONTINUOUS
    if unit.kind in ("thermal_gas", "h2_cavern") and unit.x_max <= 1:
        return BINARY
    return INTEGER


def add_investment_bounds(b: Builder) -> None:
    """Investment variables for units, candidate lines and candidate pipelines."""
    for u in b.system.units:
        b.new(invest_stem(u.kind), u.id, kind=_invest_kind(b, u), lb=0.0, ub=float(u.x_max))
    for ln in b.system.lines:
        if not ln.existing:
            b.new("xline", ln.id, kind=BINARY, ub=float(min(ln.x_max, 1)))
    for p in b.system.pipelines:
        if not p.existing:
            b.new("xpipe", p.id, kind=BINARY, ub=float(min(p.x_max, 1)))


def _emitters(b: Builder) -> bool:
    s = b.system
    if any(u.get("emis") > 0 for u in s.units_of("thermal_gas", "thermal_other")):
        return True
    if b.cfg.smr_emissions and any(u.get("emis") > 0 for u in s.units_of("smr_ccs")):
        return True
    return any(c.sector == "industry" and c.emis > 0 for c in s.demand.classes.values())


def add_objective(b: Builder) -> None:
    """Register every cost term and the investment-side contributions.

    Operational contributions are added by the sector builders, already
    multiplied by the period weights.
    """
    if b.system.units_of("gas_well"):
        b.price("c_ch4")
    if _emitters(b):
        b.price("c_co2")
    m = b.model
    for term in COST_TERMS + (OTHER_TERM,):
        m.add_objective(term, Expr())
    for u in b.system.units:
        x = b.invest_var(u)
        c_inv = u.get("c_inv")
        if u.kind in POWER_INVEST_KINDS:
            m.add_objective("gen_invest", x * c_inv)
        elif u.kind in H2_UNIT_KINDS:
            m.add_objective("h2_invest", x * c_inv)
            m.add_objective("h2_om", b.units_built(u) * u.get("c_om"))
        else:
            m.add_objective("ng_invest", x * c_inv)
            m.add_objective("ng_om", b.units_built(u) * u.get("c_om"))
    for ln in b.system.lines:
        if not ln.existing:
            m.add_objective("line_invest", b.v("xline", ln.id) * ln.invest_cost)
    for p in b.system.pipelines:
        if not p.existing:
            m.add_objective("pipe_invest", b.v("xpipe", p.id) * p.annual_cost)


def add_non_supplied_bounds(b: Builder) -> None:
    """Unserved power, hydrogen and natural gas with their penalty costs."""
    dem = b.system.demand
    for rp, k in b.steps():
        w = b.weight(rp, k)
        for bus in b.system.buses:
            d = dem.power.get((rp, k, bus), 0.0)
            pns = b.new("pns", bus, rp, k, ub=d)
            b.supply("power", (rp, k, bus), pns)
            b.model.add_objective("ens", pns * (w * b.cfg.c_ens))
        for node, cl in dem.node_classes():
            ent = f"{node}.{cl}"
            h2ns = b.new("h2ns", ent, rp, k, ub=b.big_m)
            ch4ns = b.new("ch4ns", ent, rp, k, ub=b.big_m)
            b.supply("h2", (rp, k, node), h2ns)
            b.supply("ch4", (rp, k, node), ch4ns)
            b.model.add_objective("h2ns_ch4ns", h2ns * (w * b.cfg.c_h2ns) + ch4ns * (w * b.cfg.c_ch4ns))


def add_gas_wells(b: Builder) -> None:
    for u in b.system.units_of("gas_well"):
        built = b.units_built(u)
        for rp, k in b.steps():
            p = b.new("pch4", u.id, rp, k)
            b.row("well_cap", u.id, p <= built * u.p_max, rp, k)
            b.supply("ch4", (rp, k, u.ch4um), p)
            b.model.add_objective("gas_supply", p * (b.weight(rp, k) * b.cfg.c_ch4))


def add_demand_blending(b: Builder) -> None:
    """Gas demand met by natural gas plus hydrogen at equal energy content."""
    c = b.system.constants
    dem = b.system.demand
    for node, cl in dem.node_classes():
        ent = f"{node}.{cl}"
        klass = dem.classes[cl]
        industry_co2 = klass.sector == "industry" and klass.emis > 0
        for rp, k in b.steps():
            d_gas = dem.gas.get((rp, k, node, cl), 0.0)
            d_ch4 = b.new("d_ch4", ent, rp, k, ub=d_gas)
            d_h2 = b.new("d_h2", ent, rp, k)
            b.row("blend_energy", ent, (d_ch4 * c.h_ch4 + d_h2 * c.h_h2).equals(d_gas * c.h_ch4), rp, k)
            b.row("sub_min", ent, d_h2 >= d_ch4 * klass.sub_min, rp, k)
            b.row("sub_max", ent, d_h2 <= d_ch4 * klass.sub_max, rp, k)
            key = (rp, k, node)
            b.withdraw("ch4", key, d_ch4)
            b.withdraw("h2", key, d_h2)
            b.withdraw("h2", key, dem.h2_dedicated.get((rp, k, node, cl), 0.0))
            if industry_co2:
                b.model.add_objective("co2_industry", d_ch4 * (b.weight(rp, k) * b.cfg.c_co2 * klass.emis))


def _commitment(b: Builder, u, built) -> None:
    """Integer commitment ``u`` and start-up ``y`` with output limits and ramps."""
    n_max = float(u.x_max + u.eu)
    for rp, k in b.steps():
        b.new("u", u.id, rp, k, kind=INTEGER, ub=n_max)
        b.new("y", u.id, rp, k, kind=INTEGER, ub=n_max)
    for rp, k in b.steps():
        uu, yy, pe = b.v("u", u.id, rp, k), b.v("y", u.id, rp, k), b.v("pe", u.id, rp, k)
        b.row("commit_cap", u.id, uu <= built, rp, k)
        b.row("pe_min", u.id, pe >= uu * u.get("p_min"), rp, k)
        b.row("pe_max", u.id, pe <= uu * u.p_max, rp, k)
        prev = b.ts.predecessor(rp, k)
        if prev is not None:
            b.row("startup", u.id, yy >= uu - b.v("u", u.id, rp, prev), rp, k)
            dt = b.w_k(k)
            if u.ramp_up is not None:
                b.row("ramp_up", u.id, pe - b.v("pe", u.id, rp, prev) <= u.ramp_up * dt, rp, k)
            if u.ramp_dn is not None:
                b.row("ramp_dn", u.id, b.v("pe", u.id, rp, prev) - pe <= u.ramp_dn * dt, rp, k)
        else:
            b.row("startup", u.id, yy >= uu, rp, k)


def add_gas_thermals(b: Builder) -> None:
    """Gas-fired units burning a natural gas / hydrogen mix."""
    c = b.system.constants
    bmin, bmax = b.cfg.blend_min, b.cfg.blend_max
    for u in b.system.units_of("thermal_gas"):
        built = b.units_built(u)
        cs_su, cs_up, cs_v = u.get("cs_su"), u.get("cs_up"), u.cs_v
        for rp, k in b.steps():
            pe = b.new("pe", u.id, rp, k)
            ch4_e = b.new("cs_ch4_e", u.id, rp, k)
            h2_e = b.new("cs_h2_e", u.id, rp, k)
            ch4_aux = b.new("cs_ch4_aux", u.id, rp, k)
            h2_aux = b.new("cs_h2_aux", u.id, rp, k)
        _commitment(b, u, built)
        for rp, k in b.steps():
            pe, uu, yy = b.v("pe", u.id, rp, k), b.v("u", u.id, rp, k), b.v("y", u.id, rp, k)
            ch4_e, h2_e = b.v("cs_ch4_e", u.id, rp, k), b.v("cs_h2_e", u.id, rp, k)
            ch4_aux, h2_aux = b.v("cs_ch4_aux", u.id, rp, k), b.v("cs_h2_aux", u.id, rp, k)
            aux_energy = yy * (cs_su / b.w_k(k)) + uu * cs_up
            b.row("gt_conv", u.id, (ch4_e * c.h_ch4 + h2_e * c.h_h2).equals(pe * cs_v), rp, k)
            b.row("gt_aux", u.id, (ch4_aux * c.h_ch4 + h2_aux * c.h_h2).equals(aux_energy), rp, k)
            b.row("gt_ch4_e_cap", u.id, ch4_e <= built * (cs_v * u.p_max / c.h_ch4), rp, k)
            b.row("gt_ch4_aux_cap", u.id, ch4_aux * c.h_ch4 <= aux_energy, rp, k)
            b.row("gt_blend_e_lo", u.id, h2_e >= ch4_e * bmin, rp, k)
            b.row("gt_blend_e_hi", u.id, h2_e <= ch4_e * bmax, rp, k)
            b.row("gt_blend_aux_lo", u.id, h2_aux >= ch4_aux * bmin, rp, k)
            b.row("gt_blend_aux_hi", u.id, h2_aux <= ch4_aux * bmax, rp, k)
            b.row("gt_pe_cap", u.id, pe <= built * u.p_max, rp, k)
            w = b.weight(rp, k)
            om = u.get("c_om") + (u.get("c_var") if b.cfg.gas_thermal_var_cost else 0.0)
            b.model.add_objective("gas_thermal_om", pe * (w * om))
            if u.get("emis") > 0:
                b.model.add_objective("co2_gas_thermal", (ch4_e + ch4_aux) * (w * b.cfg.c_co2 * u.emis))
            b.supply("power", (rp, k, u.gi), pe)
            b.withdraw("ch4", (rp, k, u.gm), ch4_e + ch4_aux)
            b.withdraw("h2", (rp, k, u.gm), h2_e + h2_aux)


def add_other_thermals(b: Builder) -> None:
    """Non-gas thermal units: output limits, commitment and their cost terms."""
    for u in b.system.units_of("thermal_other"):
        built = b.units_built(u)
        for rp, k in b.steps():
            b.new("pe", u.id, rp, k)
        _commitment(b, u, built)
        for rp, k in b.steps():
            pe, uu, yy = b.v("pe", u.id, rp, k), b.v("u", u.id, rp, k), b.v("y", u.id, rp, k)
            ops = yy * u.get("c_su") + uu * u.get("c_up") + pe * u.get("c_var")
            w = b.weight(rp, k)
            b.model.add_objective("other_thermal_ops", ops * w)
            if u.get("emis") > 0:
                # priced on the operating-cost expression, as the cost function states it
                b.model.add_objective("co2_other_thermal", ops * (w * b.cfg.c_co2 * u.emis))
            b.supply("power", (rp, k, u.gi), pe)


def add_policy(b: Builder, kappa: float | None = None) -> None:
    """Cap the weighted fossil-linked generation at ``(1 - kappa)`` of demand."""
    kappa = b.cfg.kappa if kappa is None else kappa
    gas = b.system.units_of("thermal_gas")
    other = b.system.units_of("thermal_other")
    if not gas and not other:
        return
    c = b.system.constants
    lhs = Expr()
    demand = 0.0
    for rp, k in b.steps():
        w = b.weight(rp, k)
        for u in other:
            lhs.iadd(b.v("pe", u.id, rp, k), w)
        for u in gas:
            lhs.iadd(b.v("cs_ch4_e", u.id, rp, k), w * c.h_ch4 / u.cs_v)
        demand += w * sum(b.system.demand.power.get((rp, k, bus), 0.0) for bus in b.system.buses)
    b.row("policy", "system", lhs <= (1.0 - kappa) * demand)


def add_power_lite(b: Builder) -> None:
    """Renewables, batteries and DC line flows."""
    for u in b.system.units_of("renewable"):
        built = b.units_built(u)
        for rp, k in b.steps():
            pe = b.new("pe", u.id, rp, k)
            cf = b.system.availability.get((rp, k, u.id), 1.0)
            b.row("res_cap", u.id, pe <= built * (cf * u.p_max), rp, k)
            b.model.add_objective("renewable_om", pe * (b.weight(rp, k) * u.get("c_om")))
            b.supply("power", (rp, k, u.gi), pe)

    for u in b.system.units_of("bess"):
        built = b.units_built(u)
        energy = u.p_max * u.etp
        cs_max = u.cs_max if u.cs_max is not None else u.p_max
        for rp, k in b.steps():
            b.new("pe", u.id, rp, k)
            b.new("cse", u.id, rp, k)
            b.new("soc_e", u.id, rp, k)
        for rp, k in b.steps():
            pe, ch, soc = b.v("pe", u.id, rp, k), b.v("cse", u.id, rp, k), b.v("soc_e", u.id, rp, k)
            dt = b.w_k(k)
            prev = b.ts.predecessor(rp, k)
            start = b.v("soc_e", u.id, rp, prev) if prev is not None else built * (u.get("in_res") * energy)
            b.row("bess_soc", u.id, soc.equals(start - pe * (dt / u.eta_dis) + ch * (dt * u.eta_ch)), rp, k)
            b.row("bess_soc_max", u.id, soc <= built * energy, rp, k)
            b.row("bess_soc_min", u.id, soc >= built * (u.get("r_min") * energy), rp, k)
            b.row("bess_dis_cap", u.id, pe <= built * u.p_max, rp, k)
            b.row("bess_ch_cap", u.id, ch <= built * cs_max, rp, k)
            b.model.add_objective("storage_om", pe * (b.weight(rp, k) * u.get("c_om")))
            b.supply("power", (rp, k, u.gi), pe)
            b.withdraw("power", (rp, k, u.gi), ch)

    buses = b.system.buses
    if not b.system.lines:
        return
    ref = buses[0]
    for rp, k in b.steps():
        for bus in buses:
            if bus == ref:
                b.new("theta", bus, rp, k, lb=0.0, ub=0.0)
            else:
                b.new("theta", bus, rp, k, lb=-math.pi, ub=math.pi)
        for ln in b.system.lines:
            fl = b.new("fl", ln.id, rp, k, lb=-ln.p_max, ub=ln.p_max)
            angle = (b.v("theta", ln.from_bus, rp, k) - b.v("theta", ln.to_bus, rp, k)) * ln.susceptance
            if ln.existing:
                b.row("dc_flow", ln.id, fl.equals(angle), rp, k)
            else:
                x = b.v("xline", ln.id)
                big = abs(ln.susceptance) * 2 * math.pi
                b.row("dc_flow_hi", ln.id, fl - angle <= (1 - x) * big, rp, k)
                b.row("dc_flow_lo", ln.id, fl - angle >= (x - 1) * big, rp, k)
                b.row("line_cap_hi", ln.id, fl <= x * ln.p_max, rp, k)
                b.row("line_cap_lo", ln.id, fl >= x * -ln.p_max, rp, k)
            b.withdraw("power", (rp, k, ln.from_bus), fl)
            b.supply("power", (rp, k, ln.to_bus), fl)


def add_power_balance(b: Builder) -> None:
    dem = b.system.demand
    for rp, k in b.steps():
        for bus in b.system.buses:
            net = b.balances["power"].get((rp, k, bus), Expr())
            b.row("bal_power", bus, net.equals(dem.power.get((rp, k, bus), 0.0)), rp, k)


def fossil_generation(b: Builder, values) -> float:
    """Weighted left-hand side of the policy row evaluated at ``values``."""
    rows = b.model.rows_with_prefix("policy")
    if not rows:
        return 0.0
    return b.model.row_activity(rows[0], values)

