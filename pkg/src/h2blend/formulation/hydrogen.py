"""Electrolyzers, SMR with carbon capture, fuel cells and the storage units
(hydrogen tanks and caverns, natural gas storage fields)."""

from __future__ import annotations

from ..backend.model import Expr
from ..errors import ConfigError
from ..temporal import window_members
from .builder import Builder

LONG_TERM_KINDS = ("h2_cavern", "ng_storage")


def add_electrolyzers(b: Builder) -> None:
    for u in b.system.units_of("electrolyzer"):
        built = b.units_built(u)
        for rp, k in b.steps():
            cse = b.new("cse", u.id, rp, k)
            ph2 = b.new("ph2", u.id, rp, k)
            b.row("el_conv", u.id, ph2.equals(cse * u.hpe), rp, k)
            b.row("el_cons_cap", u.id, cse <= built * u.p_max, rp, k)
            b.row("el_prod_cap", u.id, ph2 <= built * (u.p_max * u.hpe), rp, k)
            b.withdraw("power", (rp, k, u.gi), cse)
            b.supply("h2", (rp, k, u.h2um), ph2)


def add_smr(b: Builder) -> None:
    co2 = b.cfg.smr_emissions
    for u in b.system.units_of("smr_ccs"):
        built = b.units_built(u)
        for rp, k in b.steps():
            cs = b.new("csch4", u.id, rp, k)
            ph2 = b.new("ph2", u.id, rp, k)
            b.row("smr_conv", u.id, ph2.equals(cs * u.hpc), rp, k)
            b.row("smr_cons_cap", u.id, cs <= built * (u.p_max / u.hpc), rp, k)
            b.row("smr_prod_cap", u.id, ph2 <= built * u.p_max, rp, k)
            b.withdraw("ch4", (rp, k, u.ch4um), cs)
            b.supply("h2", (rp, k, u.h2um), ph2)
            if co2 and u.get("emis") > 0:
                # residual process emissions, booked with the industry CO2 term
                b.model.add_objective("co2_industry", ph2 * (b.weight(rp, k) * b.cfg.c_co2 * u.emis))


def add_fuel_cells(b: Builder) -> None:
    for u in b.system.units_of("fuel_cell"):
        built = b.units_built(u)
        for rp, k in b.steps():
            cs = b.new("csh2", u.id, rp, k)
            pe = b.new("pe", u.id, rp, k)
            b.row("fc_conv", u.id, pe.equals(cs * u.eph), rp, k)
            b.row("fc_cons_cap", u.id, cs <= built * u.p_max, rp, k)
            b.row("fc_prod_cap", u.id, pe <= built * (u.p_max * u.eph), rp, k)
            b.withdraw("h2", (rp, k, u.h2um), cs)
            b.supply("power", (rp, k, u.gi), pe)


def storage_mode(b: Builder, unit) -> str:
    """``intra`` (cyclic within each representative period) or ``inter`` (moving window)."""
    if unit.kind not in LONG_TERM_KINDS:
        return "intra"
    mode = b.cfg.long_term_storage
    if mode == "auto":
        return "intra" if b.ts.is_full_chronology else "inter"
    return mode


def _net_inflow(b: Builder, u, dis, ch, k) -> Expr:
    dt = b.w_k(k)
    return ch * (dt * u.eta_ch) - dis * (dt / u.eta_dis)


def _add_store(b: Builder, u, carrier: str, dis_stem: str, ch_stem: str) -> None:
    built = b.units_built(u)
    energy = u.energy_capacity
    in_res = u.get("in_res")
    r_min = u.get("r_min")
    cs_max = u.cs_max if u.cs_max is not None else u.p_max
    node = u.h2um if carrier == "h2" else u.ch4um
    for rp, k in b.steps():
        dis = b.new(dis_stem, u.id, rp, k)
        ch = b.new(ch_stem, u.id, rp, k)
        b.row("st_dis_cap", u.id, dis <= built * u.p_max, rp, k)
        b.row("st_ch_cap", u.id, ch <= built * cs_max, rp, k)
        b.supply(carrier, (rp, k, node), dis)
        b.withdraw(carrier, (rp, k, node), ch)

    mode = storage_mode(b, u)
    if mode == "intra":
        for rp, k in b.steps():
            b.new("intra", u.id, rp, k)
        for rp, k in b.steps():
            lvl = b.v("intra", u.id, rp, k)
            prev = b.ts.predecessor(rp, k)
            start = b.v("intra", u.id, rp, prev) if prev is not None else built * (in_res * energy)
            net = _net_inflow(b, u, b.v(dis_stem, u.id, rp, k), b.v(ch_stem, u.id, rp, k), k)
            b.row("intra_soc", u.id, lvl.equals(start + net), rp, k)
            b.row("intra_min", u.id, lvl >= built * (r_min * energy), rp, k)
            b.row("intra_max", u.id, lvl <= built * energy, rp, k)
        if u.kind in LONG_TERM_KINDS and b.ts.is_full_chronology:
            last = b.v("intra", u.id, b.ts.rep_periods[0], b.ts.sub_periods[-1])
            b.row("intra_end", u.id, last.equals(built * (in_res * energy)))
        return

    if b.ts.mow is None or b.ts.mow < 1:
        raise ConfigError(f"storage {u.id} needs a moving window length")
    checkpoints = b.ts.checkpoints()
    for p in checkpoints:
        b.new("inter", u.id, p=p)
    for p in checkpoints:
        lvl = b.v("inter", u.id, p=p)
        rhs = Expr()
        if p > b.ts.mow:
            rhs.iadd(b.v("inter", u.id, p=p - b.ts.mow))
        else:
            # the initial reserve enters once, in the first window
            rhs.iadd(built * (in_res * energy))
        for rp, k, mult in window_members(b.ts, p):
            rhs.iadd(_net_inflow(b, u, b.v(dis_stem, u.id, rp, k), b.v(ch_stem, u.id, rp, k), k), float(mult))
        b.row("inter_soc", u.id, lvl.equals(rhs), p=p)
        b.row("inter_min", u.id, lvl >= built * (r_min * energy), p=p)
        b.row("inter_max", u.id, lvl <= built * energy, p=p)
    final = b.v("inter", u.id, p=checkpoints[-1])
    b.row("inter_end", u.id, final.equals(built * (in_res * energy)))


def add_h2_storage(b: Builder) -> None:
    for u in b.system.units_of("h2_tank", "h2_cavern"):
        _add_store(b, u, "h2", "ph2", "csh2")


def add_ng_storage(b: Builder) -> None:
    for u in b.system.units_of("ng_storage"):
        _add_store(b, u, "ch4", "pch4", "csch4")
