"""Pipeline flow models, compressors and the nodal gas balances.

``stp``: component bounds only. ``btp``: adds one direction binary per
pipeline and representative period plus the blend envelope. ``bpp``: adds
the incremental piecewise-linear pressure/flow coupling on top of ``btp``.
"""

from __future__ import annotations

import math

from ..backend.model import BINARY, Expr
from ..errors import ConfigError
from ..physics import BreakpointTable, build_breakpoints
from .builder import Builder


def _flow_vars(b: Builder, p, rp, k, bounded_components: bool):
    f = p.f_max
    fgas = b.new("fgas", p.id, rp, k, lb=-f, ub=f)
    if bounded_components:
        bmax = b.cfg.blend_max
        fch4 = b.new("fch4", p.id, rp, k, lb=-f * (1 - bmax), ub=f * (1 - bmax))
        fh2 = b.new("fh2", p.id, rp, k, lb=-f * bmax, ub=f * bmax)
    else:
        fch4 = b.new("fch4", p.id, rp, k, lb=-math.inf, ub=math.inf)
        fh2 = b.new("fh2", p.id, rp, k, lb=-math.inf, ub=math.inf)
    b.row("flow_def", p.id, fgas.equals(fch4 + fh2), rp, k)
    for carrier, var in (("ch4", fch4), ("h2", fh2)):
        b.withdraw(carrier, (rp, k, p.from_node), var)
        b.supply(carrier, (rp, k, p.to_node), var)
    if not p.existing:
        x = b.v("xpipe", p.id)
        b.row("pipe_cand_hi", p.id, fgas <= x * f, rp, k)
        b.row("pipe_cand_lo", p.id, fgas >= x * -f, rp, k)
    return fgas, fch4, fh2


def add_stp(b: Builder) -> None:
    for p in b.system.pipelines:
        for rp, k in b.steps():
            _flow_vars(b, p, rp, k, bounded_components=True)


def _direction_rows(b: Builder, p, rp, k, fch4, fh2) -> None:
    big = b.big_m
    a = b.v("alpha", p.id, rp)
    bmax = b.cfg.blend_max
    b.row("h2_dir_lo", p.id, fh2 >= (a - 1) * big, rp, k)
    b.row("h2_dir_hi", p.id, fh2 <= a * big, rp, k)
    b.row("ch4_dir_lo", p.id, fch4 >= (a - 1) * big, rp, k)
    b.row("ch4_dir_hi", p.id, fch4 <= a * big, rp, k)
    b.row("blend_lo", p.id, fh2 >= a * -big + fch4 * bmax, rp, k)
    b.row("blend_hi", p.id, fh2 <= (1 - a) * big + fch4 * bmax, rp, k)


def add_btp(b: Builder) -> None:
    for p in b.system.pipelines:
        for rp in b.ts.rep_periods:
            b.new("alpha", p.id, rp, kind=BINARY)
        for rp, k in b.steps():
            _, fch4, fh2 = _flow_vars(b, p, rp, k, bounded_components=False)
            _direction_rows(b, p, rp, k, fch4, fh2)


def breakpoint_tables(b: Builder) -> dict[str, BreakpointTable]:
    return {p.id: build_breakpoints(p.f_max, b.cfg.n_increments) for p in b.system.pipelines}


def _check_tables(b: Builder, tables: dict[str, BreakpointTable]) -> None:
    for p in b.system.pipelines:
        t = tables.get(p.id)
        if t is None:
            raise ConfigError(f"no breakpoint table for pipeline {p.id}")
        if t.n_increments != b.cfg.n_increments:
            raise ConfigError(f"pipeline {p.id}: table has {t.n_increments} increments, config asks for {b.cfg.n_increments}")
        if not (math.isclose(t.flows[0], -p.f_max) and math.isclose(t.flows[-1], p.f_max)):
            raise ConfigError(f"pipeline {p.id}: breakpoints do not span [-f_max, f_max]")
    extra = set(tables) - {p.id for p in b.system.pipelines}
    if extra:
        raise ConfigError(f"breakpoint tables for unknown pipelines: {sorted(extra)}")


def add_pressures(b: Builder) -> None:
    for rp, k in b.steps():
        for n in b.system.nodes:
            b.new("psqr", n.id, rp, k, lb=n.p_min_sqr, ub=n.p_max_sqr)


def add_bpp(b: Builder, tables: dict[str, BreakpointTable] | None = None) -> None:
    tables = breakpoint_tables(b) if tables is None else tables
    _check_tables(b, tables)
    n_inc = b.cfg.n_increments
    for p in b.system.pipelines:
        t = tables[p.id]
        dF = [float(t.flows[i + 1] - t.flows[i]) for i in range(n_inc)]
        dV = [float(t.values[i + 1] - t.values[i]) for i in range(n_inc)]
        for rp in b.ts.rep_periods:
            b.new("alpha", p.id, rp, kind=BINARY)
        for rp, k in b.steps():
            fgas, fch4, fh2 = _flow_vars(b, p, rp, k, bounded_components=False)
            _direction_rows(b, p, rp, k, fch4, fh2)
            if p.existing:
                rho = b.new("rho", p.id, rp, k, lb=0.0, ub=0.0)
            else:
                rho = b.new("rho", p.id, rp, k, lb=-p.f_max, ub=p.f_max)
                x = b.v("xpipe", p.id)
                b.row("slack_hi", p.id, rho <= (1 - x) * p.f_max, rp, k)
                b.row("slack_lo", p.id, rho >= (x - 1) * p.f_max, rp, k)
            gammas = [b.new("gamma", f"i{i + 1:02d}__{p.id}", rp, k, ub=1.0) for i in range(n_inc)]
            deltas = [b.new("delta", f"i{i + 1:02d}__{p.id}", rp, k, kind=BINARY) for i in range(n_inc)]
            quad = Expr({}, float(t.values[0]))
            lin = Expr({}, float(t.flows[0]))
            for g, dv, df in zip(gammas, dV, dF):
                quad.add_term(g, dv)
                lin.add_term(g, df)
            pm, pn = b.v("psqr", p.from_node, rp, k), b.v("psqr", p.to_node, rp, k)
            b.row("pw_pressure", p.id, quad.equals((pm - pn) * p.r_gas), rp, k)
            b.row("pw_flow", p.id, lin.equals(rho + fgas), rp, k)
            for i in range(n_inc):
                ent = f"i{i + 1:02d}__{p.id}"
                b.row("fill_hi", ent, deltas[i] <= gammas[i], rp, k)
                if i + 1 < n_inc:
                    b.row("fill_lo", ent, gammas[i + 1] <= deltas[i], rp, k)


def add_compressors(b: Builder) -> None:
    bmax = b.cfg.blend_max
    with_pressure = b.cfg.flow_formulation == "bpp"
    for c in b.system.compressors:
        inlet = b.system.node(c.from_node)
        boost_cap = inlet.p_max_sqr - (math.sqrt(inlet.p_max_sqr) - c.max_boost) ** 2
        for rp, k in b.steps():
            f_ch4 = b.new("fcmp_ch4", c.id, rp, k)
            f_h2 = b.new("fcmp_h2", c.id, rp, k)
            b.row("cmp_cap", c.id, f_ch4 + f_h2 <= c.f_max, rp, k)
            b.row("cmp_h2_cap", c.id, f_h2 <= f_ch4 * bmax, rp, k)
            if with_pressure:
                pm, pn = b.v("psqr", c.from_node, rp, k), b.v("psqr", c.to_node, rp, k)
                b.row("cmp_ratio", c.id, pn <= pm * c.ratio_sqr, rp, k)
                b.row("cmp_boost_lo", c.id, pn - pm >= 0.0, rp, k)
                b.row("cmp_boost_hi", c.id, pn - pm <= boost_cap, rp, k)
            b.withdraw("ch4", (rp, k, c.from_node), f_ch4, 1.0 + c.cons_ch4)
            b.withdraw("h2", (rp, k, c.from_node), f_h2, 1.0 + c.cons_h2)
            b.supply("ch4", (rp, k, c.to_node), f_ch4)
            b.supply("h2", (rp, k, c.to_node), f_h2)


def add_network(b: Builder) -> None:
    form = b.cfg.flow_formulation
    if form == "bpp":
        add_pressures(b)
        add_bpp(b)
    elif form == "btp":
        add_btp(b)
    else:
        add_stp(b)
    add_compressors(b)


def add_balances(b: Builder) -> None:
    for rp, k in b.steps():
        for n in b.system.nodes:
            for carrier in ("h2", "ch4"):
                net = b.balances[carrier].get((rp, k, n.id), Expr())
                b.row(f"bal_{carrier}", n.id, net.equals(0.0), rp, k)
