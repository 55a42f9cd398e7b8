"""Reference data and small test systems.

Reference unit and network parameters are stored in model units
(MW -> GW, Sm3/h -> MSm3/h, Sm3/MWh -> MSm3/GWh, kWh/Sm3 -> GWh/MSm3).
Demands, costs of the toy systems and the gas-state constants are
synthetic. The gas constants are fitted with
:func:`h2blend.physics.calibrate_compressibility` to the reference
pipeline factor of pipe 1-2.
"""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction

from .physics import calibrate_compressibility, max_capacity, pipeline_resistance
from .system import (
    Compressor,
    DemandClass,
    DemandSet,
    EnergySystem,
    GasConstants,
    GasNode,
    Line,
    Pipeline,
    ScenarioConfig,
    Unit,
)
from .temporal import build_full_chronology, build_representative

BAR_LB = 43.0
BAR_MOP = 68.0

# (from, to, length km, R in 1e-5, F_max) for the 12-node network
SKELETON_PIPES = (
    ("1", "2", 70, 6.808, 0.435),
    ("3", "5", 70, 6.808, 0.435),
    ("4", "5", 60, 7.942, 0.469),
    ("5", "6", 45, 10.590, 0.542),
    ("4", "7", 70, 6.808, 0.435),
    ("6", "8", 80, 5.957, 0.407),
    ("7", "8", 80, 5.957, 0.407),
    ("9", "10", 125, 3.812, 0.325),
    ("10", "11", 90, 5.295, 0.383),
    ("11", "12", 85, 5.606, 0.394),
)
SKELETON_DIAMETER = 0.6

# (from, to, ratio_sqr, max boost bar, consumption p.u.)
SKELETON_COMPRESSORS = (
    ("2", "4", 1.20, 30.0, 0.0015),
    ("9", "8", 1.30, 30.0, 0.0020),
)

# well capacities, MSm3/h
WELLS = {"1": 0.425, "3": 0.425, "11": 0.283}

# skeleton network: 12 gas nodes joined by SKELETON_PIPES and SKELETON_COMPRESSORS
SKELETON_NODES = tuple(str(i) for i in range(1, 13))

DEFAULT_ROUGHNESS_MM = 0.012
CANDIDATE_PIPE_COST = 27.0  # M EUR overnight
CANDIDATE_PIPE_RATE = 0.05


def reference_constants(roughness_mm: float = DEFAULT_ROUGHNESS_MM) -> GasConstants:
    """Placeholder constants with ``k_m`` fitted so that R(1-2) matches SKELETON_PIPES."""
    base = GasConstants()
    probe = skeleton_pipe(SKELETON_PIPES[0], base, roughness_mm, r_gas=1.0, f_max=1.0)
    return calibrate_compressibility(base, probe, SKELETON_PIPES[0][3] * 1e-5)


def skeleton_pipe(row, const, roughness_mm=DEFAULT_ROUGHNESS_MM, r_gas=None, f_max=None, **kw) -> Pipeline:
    frm, to, km, r_e5, fmax = row
    pipe = Pipeline(frm, to, kw.pop("circuit", "c1"), km * 1000.0, SKELETON_DIAMETER, roughness_mm,
                    r_gas if r_gas is not None else r_e5 * 1e-5,
                    f_max if f_max is not None else fmax, **kw)
    return pipe


def regenerate_pipe_table(const: GasConstants | None = None):
    """(pipe, R computed, R reference, F_max computed, F_max reference) per SKELETON_PIPES row."""
    const = const or reference_constants()
    out = []
    lb, mop = BAR_LB**2, BAR_MOP**2
    for row in SKELETON_PIPES:
        pipe = skeleton_pipe(row, const, r_gas=1.0, f_max=1.0)
        r = pipeline_resistance(pipe, const)
        out.append((f"{row[0]}-{row[1]}", r, row[3] * 1e-5, max_capacity(r, mop, lb), row[4]))
    return out


def annual_temporal(n_rp: int, n_k: int, mow: int | None = None):
    """``n_rp`` days of ``n_k`` steps each, weighted to one year (365 days, 8760 h).

    Chronological days cycle through the representative days.
    """
    w_rp = {f"rp{r}": Fraction(365, n_rp) for r in range(1, n_rp + 1)}
    w_k = {f"k{i}": Fraction(24, n_k) for i in range(1, n_k + 1)}
    mapping = []
    p = 0
    for d in range(n_rp):
        for i in range(1, n_k + 1):
            p += 1
            mapping.append((p, f"rp{d + 1}", f"k{i}"))
    return build_representative(mapping, w_rp, w_k, mow=mow)


# ----------------------------------------------------------------- skeleton

def skeleton_system(candidate_pipe: bool = True, const: GasConstants | None = None) -> EnergySystem:
    """12-node gas network with a three-bus power side and one unit of every kind."""
    const = const or reference_constants()
    nodes = [GasNode(n, BAR_LB**2, BAR_MOP**2) for n in SKELETON_NODES]
    pipes = [skeleton_pipe(row, const) for row in SKELETON_PIPES]
    if candidate_pipe:
        row = next(r for r in SKELETON_PIPES if (r[0], r[1]) == ("5", "6"))
        pipes.append(skeleton_pipe(row, const, circuit="c2", existing=False,
                                 invest_cost=CANDIDATE_PIPE_COST, annuity_rate=CANDIDATE_PIPE_RATE))
    comps = [Compressor(m, n, "c1", ratio, boost, cons, cons, 1.0) for m, n, ratio, boost, cons in SKELETON_COMPRESSORS]
    buses = ["b1", "b2", "b3"]
    lines = [
        Line("b1", "b2", "c1", 5.0, 1.0),
        Line("b2", "b3", "c1", 5.0, 1.0),
        Line("b1", "b3", "c1", 5.0, 0.5, existing=False, invest_cost=3.0),
    ]
    units = [
        Unit("well1", "gas_well", ch4um="1", p_max=WELLS["1"], eu=1),
        Unit("well3", "gas_well", ch4um="3", p_max=WELLS["3"], eu=1),
        Unit("well11", "gas_well", ch4um="11", p_max=WELLS["11"], eu=1),
        Unit("ngs3", "ng_storage", ch4um="3", p_max=0.25, cs_max=0.18, eta_ch=0.995, eta_dis=0.995,
             etp=500.0, in_res=0.8, r_min=0.6, eu=1),
        Unit("ccgt", "thermal_gas", gi="b1", gm="6", p_max=0.4, p_min=0.08, ramp_up=0.16, ramp_dn=0.16,
             emis=0.181, cs_v=2.092, cs_su=1.162, cs_up=0.349, c_inv=16.7, c_om=0.001, x_max=1),
        Unit("ocgt", "thermal_gas", gi="b2", gm="8", p_max=0.2, p_min=0.02, ramp_up=0.18, ramp_dn=0.18,
             emis=0.181, cs_v=2.324, cs_su=0.0, cs_up=0.166, c_inv=4.96, c_om=0.001, eu=1),
        Unit("coal", "thermal_other", gi="b3", p_max=0.3, p_min=0.1, emis=0.34, c_var=0.03, c_su=0.5, c_up=0.002, eu=1),
        Unit("wind", "renewable", gi="b2", p_max=0.1, c_om=0.002, c_inv=7.26, x_max=20),
        Unit("solar", "renewable", gi="b3", p_max=0.1, c_om=0.0, c_inv=8.45, x_max=20),
        Unit("bess", "bess", gi="b1", p_max=0.05, eta_ch=0.922, eta_dis=0.922, etp=4.0, c_om=0.004,
             c_inv=3.0, x_max=10),
        Unit("pemel", "electrolyzer", gi="b2", h2um="4", p_max=0.02, hpe=0.21391, c_om=0.014, c_inv=0.7,
             x_max=20),
        Unit("smr", "smr_ccs", h2um="9", ch4um="9", p_max=0.05, hpc=0.69, emis=90.0, c_om=0.23,
             c_inv=7.97, x_max=2),
        Unit("sofc", "fuel_cell", gi="b3", h2um="12", p_max=0.0033, eph=1.797, c_om=0.046, c_inv=2.31,
             x_max=5),
        Unit("tank", "h2_tank", h2um="7", p_max=0.005, cs_max=0.0035, eta_ch=0.995, eta_dis=0.995, etp=12.0,
             in_res=0.5, r_min=0.0, c_inv=0.5, x_max=4),
        Unit("cavern", "h2_cavern", h2um="10", p_max=0.13, cs_max=0.13, eta_ch=0.995, eta_dis=0.995,
             etp=362.0, in_res=0.78, r_min=0.55, c_om=2.0, c_inv=20.0, x_max=1),
    ]
    classes = {
        "res": DemandClass("res", "residential", 0.0, 0.1),
        "ind": DemandClass("ind", "industry", 0.0, 0.2, emis=1.9),
        "h2": DemandClass("h2", "industry", 0.0, 0.0),
    }
    return EnergySystem(const, buses, lines, nodes, pipes, comps, units,
                        DemandSet(classes=classes), {})


def skeleton_demands(system: EnergySystem, ts) -> EnergySystem:
    """Attach a smooth synthetic daily profile to the skeleton."""
    dem = DemandSet(classes=system.demand.classes)
    n_k = len(ts.sub_periods)
    for r, rp in enumerate(ts.rep_periods):
        for i, k in enumerate(ts.sub_periods):
            shape = 1.0 + 0.25 * math.sin(2 * math.pi * i / n_k) + 0.1 * r
            dem.power[(rp, k, "b1")] = 0.25 * shape
            dem.power[(rp, k, "b2")] = 0.15 * shape
            dem.power[(rp, k, "b3")] = 0.10 * shape
            dem.gas[(rp, k, "5", "res")] = 0.12 * shape
            dem.gas[(rp, k, "6", "ind")] = 0.10
            dem.gas[(rp, k, "12", "res")] = 0.08 * shape
            dem.h2_dedicated[(rp, k, "8", "h2")] = 0.01
            system.availability[(rp, k, "solar")] = max(0.0, math.sin(math.pi * (i + 0.5) / n_k))
            system.availability[(rp, k, "wind")] = 0.35 + 0.2 * ((r + i) % 2)
    system.demand = dem
    return system


def skeleton_case(n_rp: int = 2, n_k: int = 4, candidate_pipe: bool = True):
    ts = annual_temporal(n_rp, n_k)
    system = skeleton_demands(skeleton_system(candidate_pipe), ts)
    cfg = ScenarioConfig(c_co2=0.00008, c_ch4=0.097, kappa=0.0)
    return system, ts, cfg


# ----------------------------------------------------------------- small fixtures

def _node(name: str) -> GasNode:
    return GasNode(name, BAR_LB**2, BAR_MOP**2)


def _pipe(frm: str, to: str, r_gas: float, f_max: float | None = None, **kw) -> Pipeline:
    if f_max is None:
        f_max = max_capacity(r_gas, BAR_MOP**2, BAR_LB**2)
    return Pipeline(frm, to, kw.pop("circuit", "c1"), 70_000.0, SKELETON_DIAMETER, DEFAULT_ROUGHNESS_MM,
                    r_gas, f_max, **kw)


def opposite_flow_case():
    """Three nodes A - B - C built so the transport-only model misroutes gas.

    Natural gas enters at A and is consumed at B and C. Hydrogen is made by
    an SMR at B and consumed at A (against the natural gas stream) and at
    C, where the hydrogen need is large relative to the natural gas that
    arrives there. Demand at C swings between sub-periods, which invites
    flow reversals on B - C.
    """
    nodes = [_node("A"), _node("B"), _node("C")]
    pipes = [_pipe("A", "B", 6.808e-5, f_max=1.0), _pipe("B", "C", 6.808e-5, f_max=0.4)]
    units = [
        Unit("wellA", "gas_well", ch4um="A", p_max=2.0, eu=1),
        Unit("wellC", "gas_well", ch4um="C", p_max=0.3, eu=1),
        Unit("smrB", "smr_ccs", h2um="B", ch4um="B", p_max=0.2, hpc=0.69, eu=1),
    ]
    classes = {"gas": DemandClass("gas", "residential", 0.0, 0.0),
               "h2": DemandClass("h2", "industry", 0.0, 0.0)}
    ts = build_representative(
        [(p, rp, k) for p, (rp, k) in enumerate(
            [(r, k) for r in ("rp1", "rp2") for k in ("k1", "k2", "k3")], start=1)],
        {"rp1": 1, "rp2": 1}, {"k1": 1, "k2": 1, "k3": 1}, targets=None,
    )
    dem = DemandSet(classes=classes)
    swing = {"k1": 0.05, "k2": 0.35, "k3": 0.05}
    for rp in ts.rep_periods:
        for k in ts.sub_periods:
            dem.gas[(rp, k, "B", "gas")] = 0.5
            dem.gas[(rp, k, "C", "gas")] = swing[k]
            dem.h2_dedicated[(rp, k, "A", "h2")] = 0.05
            dem.h2_dedicated[(rp, k, "C", "h2")] = 0.03
    system = EnergySystem(GasConstants(), [], [], nodes, pipes, [], units, dem, {})
    cfg = ScenarioConfig(flow_formulation="stp", c_ch4=0.097, c_co2=0.0, milp_gap=0.01)
    return system, ts, cfg


def corridor_case():
    """Series chain A - B - C whose pipes are each rated at their own
    single-pipe capacity; the chain as a whole cannot carry that much.

    A hydrogen source must be built at A to serve hydrogen demand at C.
    """
    r = 6.808e-5
    nodes = [_node("A"), _node("B"), _node("C")]
    pipes = [_pipe("A", "B", r), _pipe("B", "C", r)]
    f_bar = pipes[0].f_max
    units = [
        Unit("wellA", "gas_well", ch4um="A", p_max=1.0, eu=1),
        Unit("smrA", "smr_ccs", h2um="A", ch4um="A", p_max=0.05, hpc=0.69, c_inv=0.1, x_max=2),
    ]
    classes = {"gas": DemandClass("gas", "residential", 0.0, 0.0),
               "h2": DemandClass("h2", "industry", 0.0, 0.0)}
    ts = build_representative([(1, "rp1", "k1"), (2, "rp1", "k2")], {"rp1": 1}, {"k1": 1, "k2": 1}, targets=None)
    dem = DemandSet(classes=classes)
    for k in ts.sub_periods:
        dem.gas[("rp1", k, "C", "gas")] = 0.9 * f_bar
        dem.h2_dedicated[("rp1", k, "C", "h2")] = 0.09 * f_bar
    system = EnergySystem(GasConstants(), [], [], nodes, pipes, [], units, dem, {})
    cfg = ScenarioConfig(flow_formulation="btp", c_ch4=0.097, c_co2=0.0, milp_gap=0.0)
    return system, ts, cfg


def blending_case(sub_max: float = 0.1):
    """One node: a cheap electrolyzer competes with a priced gas well."""
    nodes = [_node("N")]
    units = [
        Unit("well", "gas_well", ch4um="N", p_max=5.0, eu=1),
        Unit("pv", "renewable", gi="e", p_max=1.0, eu=1),
        Unit("el", "electrolyzer", gi="e", h2um="N", p_max=1.0, hpe=0.21391, eu=1),
    ]
    classes = {"ind": DemandClass("ind", "industry", 0.0, sub_max)}
    ts = build_full_chronology(1)
    dem = DemandSet(classes=classes)
    dem.gas[("rp1", "k1", "N", "ind")] = 1.0
    system = EnergySystem(GasConstants(), ["e"], [], nodes, [], [], units, dem, {})
    cfg = ScenarioConfig(flow_formulation="stp", c_ch4=0.097, c_co2=0.0)
    return system, ts, cfg


def policy_case(kappa: float = 0.95, n_periods: int = 20):
    """One bus with renewables that fail in the last period and a CCGT."""
    nodes = [_node("G")]
    units = [
        Unit("well", "gas_well", ch4um="G", p_max=1.0, eu=1),
        Unit("ccgt", "thermal_gas", gi="e", gm="G", p_max=0.4, p_min=0.08, ramp_up=0.16, ramp_dn=0.16,
             emis=0.181, cs_v=2.092, cs_su=1.162, cs_up=0.349, c_om=0.001, eu=1),
        Unit("wind", "renewable", gi="e", p_max=0.5, eu=1),
    ]
    ts = build_full_chronology(n_periods)
    dem = DemandSet(classes={})
    availability = {}
    for i, k in enumerate(ts.sub_periods):
        dem.power[("rp1", k, "e")] = 0.1
        availability[("rp1", k, "wind")] = 0.0 if i == n_periods - 1 else 1.0
    system = EnergySystem(GasConstants(), ["e"], [], nodes, [], [], units, dem, availability)
    cfg = ScenarioConfig(flow_formulation="stp", kappa=kappa, c_ch4=0.097, c_co2=0.0)
    return system, ts, cfg


def storage_case(n_periods: int = 8, long_term: str = "intra", mow: int | None = None):
    """Hydrogen cavern smoothing electrolysis driven by a fluctuating wind farm."""
    nodes = [_node("H")]
    units = [
        Unit("wind", "renewable", gi="e", p_max=1.0, eu=1),
        Unit("el", "electrolyzer", gi="e", h2um="H", p_max=1.0, hpe=0.21391, eu=1),
        Unit("cav", "h2_cavern", h2um="H", p_max=0.13, cs_max=0.13, eta_ch=0.995, eta_dis=0.995, etp=10.0,
             in_res=0.5, r_min=0.1, eu=1),
    ]
    ts = build_full_chronology(n_periods, mow=mow)
    dem = DemandSet(classes={"h2": DemandClass("h2", "industry")})
    availability = {}
    for i, k in enumerate(ts.sub_periods):
        dem.h2_dedicated[("rp1", k, "H", "h2")] = 0.12
        availability[("rp1", k, "wind")] = 0.9 if i % 4 < 2 else 0.1
    system = EnergySystem(GasConstants(), ["e"], [], nodes, [], [], units, dem, availability)
    cfg = ScenarioConfig(flow_formulation="stp", long_term_storage=long_term, mow=mow)
    return system, ts, cfg


def tank_case():
    """Short-term tank on two representative days with different wind shapes."""
    nodes = [_node("H")]
    units = [
        Unit("wind", "renewable", gi="e", p_max=1.0, eu=1),
        Unit("el", "electrolyzer", gi="e", h2um="H", p_max=1.0, hpe=0.21391, eu=1),
        Unit("tank", "h2_tank", h2um="H", p_max=0.1, cs_max=0.07, eta_ch=0.995, eta_dis=0.995, etp=12.0,
             in_res=0.5, r_min=0.0, eu=1),
    ]
    ts = build_representative(
        [(p, rp, k) for p, (rp, k) in enumerate([(r, f"k{i}") for r in ("rp1", "rp2") for i in range(1, 5)], start=1)],
        {"rp1": 2, "rp2": 1}, {f"k{i}": Fraction(3, 2) for i in range(1, 5)}, targets=None,
    )
    dem = DemandSet(classes={"h2": DemandClass("h2", "industry")})
    availability = {}
    shapes = {"rp1": (0.9, 0.1, 0.8, 0.0), "rp2": (0.2, 0.6, 0.0, 0.7)}
    for rp in ts.rep_periods:
        for i, k in enumerate(ts.sub_periods):
            dem.h2_dedicated[(rp, k, "H", "h2")] = 0.08
            availability[(rp, k, "wind")] = shapes[rp][i]
    system = EnergySystem(GasConstants(), ["e"], [], nodes, [], [], units, dem, availability)
    return system, ts, ScenarioConfig(flow_formulation="stp")


def expansion_toy():
    """Two gas nodes, two periods; hydrogen can come from a local SMR, from an
    electrolyzer at the other node through a candidate pipeline, or go unserved.

    Investment vector: candidate pipeline (0/1), SMR units (0..2),
    electrolyzers (0..3), wind units (0..3): 96 combinations.
    """
    nodes = [_node("P"), _node("Q")]
    pipes = [replace(_pipe("P", "Q", 6.808e-5), existing=False, invest_cost=2.0, annuity_rate=0.05)]
    units = [
        Unit("wellQ", "gas_well", ch4um="Q", p_max=1.0, eu=1),
        Unit("smrQ", "smr_ccs", h2um="Q", ch4um="Q", p_max=0.02, hpc=0.69, c_inv=0.4, c_om=0.01, x_max=2),
        Unit("elP", "electrolyzer", gi="e", h2um="P", p_max=0.05, hpe=0.21391, c_inv=0.02, c_om=0.002, x_max=3),
        Unit("windP", "renewable", gi="e", p_max=0.06, c_inv=0.03, c_om=0.0005, x_max=3),
    ]
    ts = build_full_chronology(2)
    dem = DemandSet(classes={"h2": DemandClass("h2", "industry"), "gas": DemandClass("gas", "residential", 0.0, 0.1)})
    availability = {("rp1", ts.sub_periods[0], "windP"): 0.9, ("rp1", ts.sub_periods[1], "windP"): 0.4}
    for k, h2 in zip(ts.sub_periods, (0.025, 0.035)):
        dem.h2_dedicated[("rp1", k, "Q", "h2")] = h2
        dem.gas[("rp1", k, "Q", "gas")] = 0.2
        dem.power[("rp1", k, "e")] = 0.0
    system = EnergySystem(GasConstants(), ["e"], [], nodes, pipes, [], units, dem, availability)
    cfg = ScenarioConfig(flow_formulation="stp", c_ch4=0.097, c_co2=0.0, c_h2ns=30.0, c_ch4ns=3.0,
                         continuous_invest=(), milp_gap=0.0)
    return system, ts, cfg
