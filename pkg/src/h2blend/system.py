"""Typed data model of the power / gas / hydrogen system and its CSV bundle.

All values are stored in model units: GW and GWh on the power side,
MSm3/h and MSm3 on the gas side, bar^2 for squared pressures, M EUR for
costs. The CSV files use the same units; ``cases`` shows how
parameters quoted in MW, Sm3/h or EUR are converted.

System directory layout (every file optional unless noted)::

    gas_constants.txt   key = value
    buses.csv           id
    lines.csv           from_bus,to_bus,circuit,susceptance,p_max,existing,invest_cost,x_max
    gas_nodes.csv       id,p_min_sqr,p_max_sqr
    pipelines.csv       from_node,to_node,circuit,length,diameter,roughness,r_gas,f_max,
                        existing,invest_cost,annuity_rate,lifetime,x_max
    compressors.csv     from_node,to_node,circuit,ratio_sqr,max_boost,cons_ch4,cons_h2,f_max
    units.csv           id,kind,<attachments>,<parameters>   (see UNIT_COLUMNS)
    availability.csv    rp,k,unit,value
    classes.csv         class,sector,sub_min,sub_max,emis
    demand_power.csv    rp,k,bus,value
    demand_gas.csv      rp,k,node,class,value
    demand_h2.csv       rp,k,node,class,value
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterator

from .errors import ConfigError, LinkError, SchemaError

UNIT_KINDS = (
    "gas_well",
    "ng_storage",
    "thermal_gas",
    "thermal_other",
    "renewable",
    "bess",
    "electrolyzer",
    "smr_ccs",
    "fuel_cell",
    "h2_tank",
    "h2_cavern",
)
POWER_KINDS = ("thermal_gas", "thermal_other", "renewable", "bess")
H2_KINDS = ("electrolyzer", "smr_ccs", "fuel_cell", "h2_tank", "h2_cavern")
NG_KINDS = ("gas_well", "ng_storage")
STORAGE_KINDS = ("bess", "ng_storage", "h2_tank", "h2_cavern")
LONG_TERM_KINDS = ("ng_storage", "h2_cavern")

ATTACHMENTS = ("gi", "gm", "h2um", "ch4um")

# attachments each kind must have; everything else must be empty
_REQUIRED_ATTACH = {
    "gas_well": ("ch4um",),
    "ng_storage": ("ch4um",),
    "thermal_gas": ("gi", "gm"),
    "thermal_other": ("gi",),
    "renewable": ("gi",),
    "bess": ("gi",),
    "electrolyzer": ("gi", "h2um"),
    "smr_ccs": ("h2um", "ch4um"),
    "fuel_cell": ("gi", "h2um"),
    "h2_tank": ("h2um",),
    "h2_cavern": ("h2um",),
}

_STORAGE_FIELDS = ("p_max", "cs_max", "eta_ch", "eta_dis", "etp")
_REQUIRED_PARAMS = {
    "gas_well": ("p_max",),
    "ng_storage": _STORAGE_FIELDS,
    "thermal_gas": ("p_max", "cs_v"),
    "thermal_other": ("p_max",),
    "renewable": ("p_max",),
    "bess": ("p_max", "eta_ch", "eta_dis", "etp"),
    "electrolyzer": ("p_max", "hpe"),
    "smr_ccs": ("p_max", "hpc"),
    "fuel_cell": ("p_max", "eph"),
    "h2_tank": _STORAGE_FIELDS,
    "h2_cavern": _STORAGE_FIELDS,
}


@dataclass(frozen=True)
class GasConstants:
    h_ch4: float = 10.0
    h_h2: float = 3.0
    t_n: float = 273.15
    t_m: float = 281.15
    p_n: float = 1.01325
    rho_n: float = 0.78
    rho_m: float = 42.0
    eta_m: float = 11.0
    k_m: float = 0.88
    v_m: float = 7.5

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise SchemaError(f"gas constant {f.name} must be strictly positive", "gas_constants")
        if not self.h_ch4 > self.h_h2:
            raise SchemaError("h_ch4 must exceed h_h2", "gas_constants")


# Heating values and gas state above are placeholders; override per study.
PLACEHOLDER_CONSTANTS = GasConstants()


@dataclass(frozen=True)
class GasNode:
    id: str
    p_min_sqr: float
    p_max_sqr: float

    @property
    def lb_bar(self) -> float:
        return math.sqrt(self.p_min_sqr)

    @property
    def mop_bar(self) -> float:
        return math.sqrt(self.p_max_sqr)


@dataclass(frozen=True)
class Pipeline:
    from_node: str
    to_node: str
    circuit: str
    length: float
    diameter: float
    roughness: float
    r_gas: float
    f_max: float
    existing: bool = True
    invest_cost: float = 0.0
    annuity_rate: float = 0.05
    lifetime: float = math.inf
    x_max: int = 1

    @property
    def id(self) -> str:
        return f"{self.from_node}_{self.to_node}_{self.circuit}"

    @property
    def annuity_factor(self) -> float:
        r, n = self.annuity_rate, self.lifetime
        if r == 0:
            return 1.0 / n if math.isfinite(n) else 0.0
        if not math.isfinite(n):
            return r
        return r / (1.0 - (1.0 + r) ** (-n))

    @property
    def annual_cost(self) -> float:
        return self.invest_cost * self.annuity_factor


@dataclass(frozen=True)
class Compressor:
    from_node: str
    to_node: str
    circuit: str
    ratio_sqr: float
    max_boost: float
    cons_ch4: float
    cons_h2: float
    f_max: float

    @property
    def id(self) -> str:
        return f"{self.from_node}_{self.to_node}_{self.circuit}"


@dataclass(frozen=True)
class Line:
    from_bus: str
    to_bus: str
    circuit: str
    susceptance: float
    p_max: float
    existing: bool = True
    invest_cost: float = 0.0
    x_max: int = 1

    @property
    def id(self) -> str:
        return f"{self.from_bus}_{self.to_bus}_{self.circuit}"


@dataclass(frozen=True)
class Unit:
    id: str
    kind: str
    gi: str | None = None
    gm: str | None = None
    h2um: str | None = None
    ch4um: str | None = None
    p_max: float | None = None
    p_min: float | None = None
    cs_max: float | None = None
    hpe: float | None = None
    hpc: float | None = None
    eph: float | None = None
    cs_v: float | None = None
    cs_su: float | None = None
    cs_up: float | None = None
    eta_ch: float | None = None
    eta_dis: float | None = None
    etp: float | None = None
    in_res: float | None = None
    r_min: float | None = None
    ramp_up: float | None = None
    ramp_dn: float | None = None
    emis: float | None = None
    c_inv: float | None = None
    c_om: float | None = None
    c_var: float | None = None
    c_su: float | None = None
    c_up: float | None = None
    eu: float = 0
    x_max: float = 0

    def __post_init__(self):
        # unit counts may be fractional for continuously sized technologies
        object.__setattr__(self, "eu", float(self.eu))
        object.__setattr__(self, "x_max", float(self.x_max))

    def get(self, name: str, default: float = 0.0) -> float:
        v = getattr(self, name)
        return default if v is None else v

    @property
    def energy_capacity(self) -> float:
        """Energy per unit of capacity: p_max * etp."""
        return self.p_max * self.etp


UNIT_COLUMNS = tuple(f.name for f in fields(Unit))


@dataclass(frozen=True)
class DemandClass:
    id: str
    sector: str
    sub_min: float = 0.0
    sub_max: float = 0.0
    emis: float = 0.0


@dataclass
class DemandSet:
    power: dict = field(default_factory=dict)  # (rp, k, bus) -> GW
    gas: dict = field(default_factory=dict)  # (rp, k, node, cl) -> MSm3/h
    h2_dedicated: dict = field(default_factory=dict)  # (rp, k, node, cl) -> MSm3/h
    classes: dict = field(default_factory=dict)  # cl -> DemandClass

    def node_classes(self) -> list[tuple[str, str]]:
        """(node, class) pairs carrying any gas or hydrogen demand entry."""
        seen = {}
        for table in (self.gas, self.h2_dedicated):
            for (_, _, node, cl) in table:
                seen[(node, cl)] = None
        return list(seen)


@dataclass
class EnergySystem:
    constants: GasConstants = field(default_factory=GasConstants)
    buses: list[str] = field(default_factory=list)
    lines: list[Line] = field(default_factory=list)
    nodes: list[GasNode] = field(default_factory=list)
    pipelines: list[Pipeline] = field(default_factory=list)
    compressors: list[Compressor] = field(default_factory=list)
    units: list[Unit] = field(default_factory=list)
    demand: DemandSet = field(default_factory=DemandSet)
    availability: dict = field(default_factory=dict)  # (rp, k, unit) -> p.u.

    def node(self, node_id: str) -> GasNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def units_of(self, *kinds: str) -> list[Unit]:
        return [u for u in self.units if u.kind in kinds]

    def unit(self, unit_id: str) -> Unit:
        for u in self.units:
            if u.id == unit_id:
                return u
        raise KeyError(unit_id)

    def pipeline(self, pipe_id: str) -> Pipeline:
        for p in self.pipelines:
            if p.id == pipe_id:
                return p
        raise KeyError(pipe_id)

    def max_pipeline_capacity(self) -> float:
        caps = [p.f_max for p in self.pipelines] + [c.f_max for c in self.compressors]
        return max(caps, default=0.0)


@dataclass(frozen=True)
class ScenarioConfig:
    flow_formulation: str = "btp"
    blend_min: float = 0.0
    blend_max: float = 0.1
    kappa: float = 0.0
    c_co2: float | None = None
    c_ch4: float | None = None
    c_ens: float = 10.0
    c_h2ns: float = 3.0
    c_ch4ns: float = 3.0
    n_increments: int = 6
    mow: int | None = None
    milp_gap: float = 0.01
    time_limit: float = 600.0
    big_m: float | None = None
    mode: str = "plan"
    continuous_invest: tuple[str, ...] = ("renewable", "bess", "electrolyzer", "smr_ccs", "h2_tank", "fuel_cell")
    long_term_storage: str = "auto"
    gas_thermal_var_cost: bool = False
    smr_emissions: bool = True
    solver: str = "highs"

    def __post_init__(self):
        object.__setattr__(self, "flow_formulation", str(self.flow_formulation).lower())
        if self.flow_formulation not in ("stp", "btp", "bpp"):
            raise ConfigError(f"unknown flow formulation {self.flow_formulation!r}")
        if not 0 <= self.blend_min <= self.blend_max:
            raise ConfigError("need 0 <= blend_min <= blend_max")
        if not 0 <= self.kappa <= 1:
            raise ConfigError("kappa must lie in [0, 1]")
        if self.n_increments < 2:
            raise ConfigError("n_increments must be >= 2")
        if self.mode not in ("plan", "operate_fixed"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.long_term_storage not in ("auto", "inter", "intra"):
            raise ConfigError(f"unknown long_term_storage {self.long_term_storage!r}")
        if self.milp_gap < 0:
            raise ConfigError("milp_gap must be non-negative")
        bad = set(self.continuous_invest) - set(UNIT_KINDS)
        if bad:
            raise ConfigError(f"unknown unit kinds in continuous_invest: {sorted(bad)}")

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def resolved_big_m(self, system: EnergySystem) -> float:
        if self.big_m is not None:
            if self.big_m <= system.max_pipeline_capacity():
                raise ConfigError("big_m must exceed every pipeline and compressor capacity")
            return self.big_m
        return 10.0 * max(system.max_pipeline_capacity(), 1.0)


# --------------------------------------------------------------------- parsing

def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "y"):
        return True
    if t in ("0", "false", "no", "n"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(value)
    return str(value)


def _convert(name: str, typ, text: str):
    if typ in (float, "float"):
        return float(text)
    if typ in (int, "int"):
        return int(text)
    if typ in (bool, "bool"):
        return _parse_bool(text)
    if typ in ("float | None",):
        return float(text)
    if typ in ("int | None",):
        return int(text)
    if typ in ("tuple[str, ...]",):
        return tuple(s.strip() for s in text.split(",") if s.strip())
    return text


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _typed_from_mapping(cls, values: dict[str, str], table: str):
    known = {f.name: f.type for f in fields(cls)}
    unknown = set(values) - known.keys()
    if unknown:
        raise ConfigError(f"{table}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key, text in values.items():
        if known[key] == "tuple[str, ...]" and text == "":
            kwargs[key] = ()
            continue
        if text == "" or text.lower() == "none":
            kwargs[key] = None
            continue
        try:
            kwargs[key] = _convert(key, known[key], text)
        except ValueError as exc:
            raise ConfigError(f"{table}: bad value for {key}: {exc}") from exc
    return cls(**kwargs)


def load_config(path: str | Path) -> ScenarioConfig:
    return _typed_from_mapping(ScenarioConfig, parse_key_values(Path(path).read_text()), str(path))


def config_to_text(cfg: ScenarioConfig) -> str:
    return "".join(f"{f.name} = {_fmt(getattr(cfg, f.name))}\n" for f in fields(cfg))


def _read_rows(path: Path, columns: tuple[str, ...], required: tuple[str, ...]) -> Iterator[tuple[int, dict]]:
    if not path.exists():
        return
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        unknown = set(header) - set(columns)
        if unknown:
            raise SchemaError(f"unknown columns {sorted(unknown)}", path.name)
        missing = set(required) - set(header)
        if missing:
            raise SchemaError(f"missing columns {sorted(missing)}", path.name)
        for i, row in enumerate(reader, start=2):
            yield i, {k: (v.strip() if v is not None else "") for k, v in row.items()}


def _num(row: dict, key: str, table: str, lineno: int, default=None, cast=float):
    text = row.get(key, "")
    if text == "":
        if default is None:
            raise SchemaError(f"missing value for {key}", table, lineno)
        return default
    try:
        return cast(text)
    except ValueError as exc:
        raise SchemaError(f"bad value for {key}: {text!r}", table, lineno) from exc


def _opt(row: dict, key: str, table: str, lineno: int):
    text = row.get(key, "")
    if text == "":
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise SchemaError(f"bad value for {key}: {text!r}", table, lineno) from exc


_LINE_COLS = ("from_bus", "to_bus", "circuit", "susceptance", "p_max", "existing", "invest_cost", "x_max")
_NODE_COLS = ("id", "p_min_sqr", "p_max_sqr")
_PIPE_COLS = tuple(f.name for f in fields(Pipeline))
_CMP_COLS = tuple(f.name for f in fields(Compressor))
_CLASS_COLS = ("class", "sector", "sub_min", "sub_max", "emis")
_UNIT_FLOATS = tuple(f.name for f in fields(Unit) if f.name not in ("id", "kind") + ATTACHMENTS)


def load_system(directory: str | Path) -> EnergySystem:
    """Read, cross-link and invariant-check a system directory."""
    d = Path(directory)
    constants = PLACEHOLDER_CONSTANTS
    if (d / "gas_constants.txt").exists():
        values = parse_key_values((d / "gas_constants.txt").read_text())
        try:
            constants = _typed_from_mapping(GasConstants, values, "gas_constants.txt")
        except ConfigError as exc:
            raise SchemaError(str(exc), "gas_constants.txt") from exc

    buses = [row["id"] for _, row in _read_rows(d / "buses.csv", ("id",), ("id",))]

    lines = []
    for i, r in _read_rows(d / "lines.csv", _LINE_COLS, _LINE_COLS[:5]):
        t = "lines.csv"
        lines.append(Line(
            r["from_bus"], r["to_bus"], r["circuit"],
            _num(r, "susceptance", t, i), _num(r, "p_max", t, i),
            _num(r, "existing", t, i, True, _parse_bool),
            _num(r, "invest_cost", t, i, 0.0), _num(r, "x_max", t, i, 1, int),
        ))

    nodes = []
    for i, r in _read_rows(d / "gas_nodes.csv", _NODE_COLS, _NODE_COLS):
        nodes.append(GasNode(r["id"], _num(r, "p_min_sqr", "gas_nodes.csv", i), _num(r, "p_max_sqr", "gas_nodes.csv", i)))

    pipelines = []
    for i, r in _read_rows(d / "pipelines.csv", _PIPE_COLS, _PIPE_COLS[:8]):
        t = "pipelines.csv"
        pipelines.append(Pipeline(
            r["from_node"], r["to_node"], r["circuit"],
            _num(r, "length", t, i), _num(r, "diameter", t, i), _num(r, "roughness", t, i),
            _num(r, "r_gas", t, i), _num(r, "f_max", t, i),
            _num(r, "existing", t, i, True, _parse_bool),
            _num(r, "invest_cost", t, i, 0.0), _num(r, "annuity_rate", t, i, 0.05),
            _num(r, "lifetime", t, i, math.inf), _num(r, "x_max", t, i, 1, int),
        ))

    compressors = []
    for i, r in _read_rows(d / "compressors.csv", _CMP_COLS, _CMP_COLS):
        t = "compressors.csv"
        compressors.append(Compressor(
            r["from_node"], r["to_node"], r["circuit"],
            *(_num(r, c, t, i) for c in _CMP_COLS[3:]),
        ))

    units = []
    for i, r in _read_rows(d / "units.csv", UNIT_COLUMNS, ("id", "kind")):
        t = "units.csv"
        kw = {"id": r["id"], "kind": r["kind"]}
        for a in ATTACHMENTS:
            kw[a] = r.get(a) or None
        for name in _UNIT_FLOATS:
            kw[name] = _opt(r, name, t, i)
        kw["eu"] = kw["eu"] or 0.0
        kw["x_max"] = kw["x_max"] or 0.0
        units.append(_check_unit(Unit(**kw), t, i))

    demand = DemandSet()
    for i, r in _read_rows(d / "classes.csv", _CLASS_COLS, ("class", "sector")):
        t = "classes.csv"
        demand.classes[r["class"]] = DemandClass(
            r["class"], r["sector"], _num(r, "sub_min", t, i, 0.0),
            _num(r, "sub_max", t, i, 0.0), _num(r, "emis", t, i, 0.0),
        )
    for i, r in _read_rows(d / "demand_power.csv", ("rp", "k", "bus", "value"), ("rp", "k", "bus", "value")):
        demand.power[(r["rp"], r["k"], r["bus"])] = _num(r, "value", "demand_power.csv", i)
    for name, target in (("demand_gas.csv", demand.gas), ("demand_h2.csv", demand.h2_dedicated)):
        cols = ("rp", "k", "node", "class", "value")
        for i, r in _read_rows(d / name, cols, cols):
            target[(r["rp"], r["k"], r["node"], r["class"])] = _num(r, "value", name, i)

    availability = {}
    for i, r in _read_rows(d / "availability.csv", ("rp", "k", "unit", "value"), ("rp", "k", "unit", "value")):
        availability[(r["rp"], r["k"], r["unit"])] = _num(r, "value", "availability.csv", i)

    system = EnergySystem(constants, buses, lines, nodes, pipelines, compressors, units, demand, availability)
    check_system(system)
    return system


def _check_unit(u: Unit, table="units", row=None) -> Unit:
    if u.kind not in UNIT_KINDS:
        raise SchemaError(f"unit {u.id}: unknown kind {u.kind!r}", table, row)
    for name in _REQUIRED_PARAMS[u.kind]:
        if getattr(u, name) is None:
            raise SchemaError(f"unit {u.id}: {u.kind} requires {name}", table, row)
    if u.p_max is not None and u.p_max < 0:
        raise SchemaError(f"unit {u.id}: p_max must be non-negative", table, row)
    if u.p_min is not None and u.p_max is not None and u.p_min > u.p_max:
        raise SchemaError(f"unit {u.id}: p_min exceeds p_max", table, row)
    for eta in ("eta_ch", "eta_dis"):
        v = getattr(u, eta)
        if v is not None and not 0 < v <= 1:
            raise SchemaError(f"unit {u.id}: {eta} must lie in (0, 1]", table, row)
    if u.r_min is not None and not 0 <= u.r_min < 1:
        raise SchemaError(f"unit {u.id}: r_min must lie in [0, 1)", table, row)
    if u.in_res is not None and not 0 <= u.in_res <= 1:
        raise SchemaError(f"unit {u.id}: in_res must lie in [0, 1]", table, row)
    if u.eu < 0 or u.x_max < 0:
        raise SchemaError(f"unit {u.id}: eu and x_max must be non-negative", table, row)
    return u


def check_system(system: EnergySystem) -> None:
    """Cross-reference and invariant checks; raises on the first problem."""
    node_ids = [n.id for n in system.nodes]
    if len(set(node_ids)) != len(node_ids):
        raise SchemaError("duplicate gas node ids", "gas_nodes.csv")
    nodes = set(node_ids)
    buses = set(system.buses)
    for i, n in enumerate(system.nodes, start=2):
        if not 0 <= n.p_min_sqr < n.p_max_sqr:
            raise SchemaError(f"node {n.id}: need 0 <= p_min_sqr < p_max_sqr", "gas_nodes.csv", i)
    for i, p in enumerate(system.pipelines, start=2):
        for end in (p.from_node, p.to_node):
            if end not in nodes:
                raise LinkError(f"pipeline {p.id} references missing node {end}", "pipelines.csv", i)
        if p.r_gas <= 0 or p.f_max <= 0:
            raise SchemaError(f"pipeline {p.id}: r_gas and f_max must be positive", "pipelines.csv", i)
        if min(p.length, p.diameter) <= 0 or p.roughness < 0:
            raise SchemaError(f"pipeline {p.id}: bad geometry", "pipelines.csv", i)
    for i, c in enumerate(system.compressors, start=2):
        for end in (c.from_node, c.to_node):
            if end not in nodes:
                raise LinkError(f"compressor {c.id} references missing node {end}", "compressors.csv", i)
        if c.ratio_sqr < 1:
            raise SchemaError(f"compressor {c.id}: ratio_sqr must be >= 1", "compressors.csv", i)
        if not (0 <= c.cons_ch4 < 1 and 0 <= c.cons_h2 < 1):
            raise SchemaError(f"compressor {c.id}: consumption fractions must lie in [0, 1)", "compressors.csv", i)
        if c.f_max <= 0:
            raise SchemaError(f"compressor {c.id}: f_max must be positive", "compressors.csv", i)
    for i, ln in enumerate(system.lines, start=2):
        for end in (ln.from_bus, ln.to_bus):
            if end not in buses:
                raise LinkError(f"line {ln.id} references missing bus {end}", "lines.csv", i)
    ids = [u.id for u in system.units]
    dup = {x for x in ids if ids.count(x) > 1}
    if dup:
        raise SchemaError(f"duplicate unit ids {sorted(dup)}", "units.csv")
    for i, u in enumerate(system.units, start=2):
        _check_unit(u, "units.csv", i)
        for attr, pool in (("gi", buses), ("gm", nodes), ("h2um", nodes), ("ch4um", nodes)):
            ref = getattr(u, attr)
            if ref is not None and ref not in pool:
                raise LinkError(f"unit {u.id}: {attr} references missing {ref}", "units.csv", i)
    for (rp, k, bus), v in system.demand.power.items():
        if bus not in buses:
            raise LinkError(f"power demand at missing bus {bus}", "demand_power.csv")
        if v < 0:
            raise SchemaError("negative power demand", "demand_power.csv")
    for name, table in (("demand_gas.csv", system.demand.gas), ("demand_h2.csv", system.demand.h2_dedicated)):
        for (rp, k, node, cl), v in table.items():
            if node not in nodes:
                raise LinkError(f"demand at missing node {node}", name)
            if cl not in system.demand.classes:
                raise LinkError(f"demand for undeclared class {cl}", name)
            if v < 0:
                raise SchemaError("negative demand", name)
    for cl in system.demand.classes.values():
        if not 0 <= cl.sub_min <= cl.sub_max:
            raise SchemaError(f"class {cl.id}: need 0 <= sub_min <= sub_max", "classes.csv")
    unit_ids = set(ids)
    for (_, _, uid) in system.availability:
        if uid not in unit_ids:
            raise LinkError(f"availability for missing unit {uid}", "availability.csv")


def validate_attachments(system: EnergySystem) -> list[tuple[str, str]]:
    """Report units whose bus/node attachments do not fit their kind.

    Returns ``(unit_id, message)`` pairs; an empty list means all good.
    """
    issues = []
    seen = set()
    for u in system.units:
        if u.id in seen:
            issues.append((u.id, "duplicate unit id"))
        seen.add(u.id)
        required = _REQUIRED_ATTACH.get(u.kind, ())
        for a in ATTACHMENTS:
            present = getattr(u, a) is not None
            if a in required and not present:
                issues.append((u.id, f"{u.kind} is missing its {a} attachment"))
            elif a not in required and present:
                issues.append((u.id, f"{u.kind} must not have a {a} attachment"))
    return issues


def export_system(system: EnergySystem, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)

    def write(name, header, rows):
        with open(d / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])

    (d / "gas_constants.txt").write_text(
        "".join(f"{k} = {_fmt(v)}\n" for k, v in asdict(system.constants).items())
    )
    write("buses.csv", ("id",), [(b,) for b in system.buses])
    write("lines.csv", _LINE_COLS, [tuple(getattr(ln, c) for c in _LINE_COLS) for ln in system.lines])
    write("gas_nodes.csv", _NODE_COLS, [(n.id, n.p_min_sqr, n.p_max_sqr) for n in system.nodes])
    write("pipelines.csv", _PIPE_COLS, [tuple(getattr(p, c) for c in _PIPE_COLS) for p in system.pipelines])
    write("compressors.csv", _CMP_COLS, [tuple(getattr(c, n) for n in _CMP_COLS) for c in system.compressors])
    write("units.csv", UNIT_COLUMNS, [tuple(getattr(u, c) for c in UNIT_COLUMNS) for u in system.units])
    write("availability.csv", ("rp", "k", "unit", "value"), [(*key, v) for key, v in system.availability.items()])
    write("classes.csv", _CLASS_COLS, [(c.id, c.sector, c.sub_min, c.sub_max, c.emis) for c in system.demand.classes.values()])
    write("demand_power.csv", ("rp", "k", "bus", "value"), [(*key, v) for key, v in system.demand.power.items()])
    write("demand_gas.csv", ("rp", "k", "node", "class", "value"), [(*key, v) for key, v in system.demand.gas.items()])
    write("demand_h2.csv", ("rp", "k", "node", "class", "value"), [(*key, v) for key, v in system.demand.h2_dedicated.items()])
