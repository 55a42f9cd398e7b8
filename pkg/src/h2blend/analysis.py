"""Scenario runs, fixed-investment audits and physical checks on solutions.

A run goes through build, emit, solve and parse, then re-checks the parsed
point against the in-memory model. Every table written here is plain CSV
with floats printed by ``repr``, so identical solver output always gives
identical files.
"""

from __future__ import annotations

import csv
import math
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .backend import emit, solve_file
from .backend.model import Solution
from .errors import AuditError, ConfigError, ProtocolError
from .formulation import OTHER_TERM, Builder, build_model, investment_names
from .system import EnergySystem, ScenarioConfig
from .temporal import TemporalStructure

FLOW_TOL = 1e-6
PRESSURE_TOL = 1e-4  # bar
VIOLATION_KINDS = ("sign", "blend", "mop", "balance", "direction")


@dataclass
class CostBreakdown:
    """Objective split by cost term; ``other`` is always present."""

    terms: dict[str, float]

    @property
    def total(self) -> float:
        return math.fsum(self.terms.values())

    def rows(self):
        return sorted(self.terms.items())


@dataclass
class SolutionReport:
    builder: Builder
    solution: Solution
    costs: CostBreakdown | None = None
    max_bound_violation: float = 0.0
    max_row_residual: float = 0.0
    out_dir: Path | None = None

    @property
    def status(self) -> str:
        return self.solution.status

    @property
    def ok(self) -> bool:
        return self.solution.ok

    @property
    def objective(self) -> float | None:
        return self.solution.objective

    @property
    def formulation(self) -> str:
        return self.builder.cfg.flow_formulation

    @property
    def values(self) -> dict[str, float]:
        return self.solution.values

    def value(self, stem: str, entity, rp=None, k=None, p=None) -> float:
        return self.solution.values[self.builder.v(stem, entity, rp, k, p).name]

    def investments(self) -> dict[str, float]:
        return {n: self.solution.values[n] for n in investment_names(self.builder.model)}

    def weighted_total(self, stem: str) -> float:
        """Sum of ``W(rp,k) * value`` over every variable of ``stem``."""
        b = self.builder
        return math.fsum(b.weight(rp, k) * self.solution.values[v.name]
                         for _, rp, k, _, v in b.items(stem) if rp is not None and k is not None)


# ------------------------------------------------------------------ files

def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return path


def write_solution(report: SolutionReport, path: Path) -> Path:
    model = report.builder.model
    return _write_csv(path, ("name", "value"), ((v.name, report.values[v.name]) for v in model.variables))


def read_solution(path: str | Path) -> dict[str, float]:
    """Variable values from a ``solution.csv`` written by a previous run."""
    with open(path, newline="") as fh:
        return {r["name"]: float(r["value"]) for r in csv.DictReader(fh)}


def _infeasibility_hint(b: Builder, path: Path) -> Path:
    """Row families of an infeasible model, for a first look at what clashes."""
    counts = Counter(r.name.split("__", 1)[0] for r in b.model.rows)
    lines = [f"{stem}\t{n}" for stem, n in sorted(counts.items())]
    fixed = [n for n in investment_names(b.model) if b.model.var(n).lb == b.model.var(n).ub]
    lines += [f"fixed\t{name}" for name in fixed]
    path.write_text("\n".join(lines) + "\n")
    return path


# ------------------------------------------------------------------ runs

def run_scenario(system: EnergySystem, ts: TemporalStructure, cfg: ScenarioConfig,
                 out_dir: str | Path | None = None, fixed: dict[str, float] | None = None,
                 fmt: str | None = None) -> SolutionReport:
    """Build, emit, solve and check one scenario.

    With ``out_dir`` the model file, the solver files, ``solution.csv`` and
    ``costs.csv`` are kept there; otherwise a temporary directory is used.
    """
    b = build_model(system, ts, cfg, fixed=fixed)
    if out_dir is None:
        with tempfile.TemporaryDirectory(prefix="h2blend_run_") as tmp:
            return _run(b, Path(tmp), fmt, keep=False)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _run(b, out, fmt, keep=True)


def _run(b: Builder, out: Path, fmt: str | None, keep: bool) -> SolutionReport:
    cfg = b.cfg
    fmt = fmt or ("lp" if cfg.solver == "cbc" else "mps")
    path = emit(b.model, out / f"model.{'lp' if fmt == 'lp' else 'mps'}", fmt)
    sol = solve_file(path, cfg.milp_gap, cfg.time_limit, cfg.solver, out, offset=b.model.objective().const)
    report = SolutionReport(b, sol, out_dir=out if keep else None)
    if not sol.ok:
        if keep:
            _infeasibility_hint(b, out / "infeasible_rows.txt")
        return report
    for v in b.model.variables:
        if v.name not in sol.values and v.lb <= 0.0 <= v.ub:
            sol.values[v.name] = 0.0
    missing = [v.name for v in b.model.variables if v.name not in sol.values]
    if missing:
        raise ProtocolError(f"solver output lacks {len(missing)} variables, e.g. {missing[0]}")
    terms = b.model.term_values(sol.values)
    terms.setdefault(OTHER_TERM, 0.0)
    report.costs = CostBreakdown(terms)
    report.max_bound_violation = sol.max_bound_violation(b.model)
    report.max_row_residual = max((b.model.row_residual(r, sol.values) for r in b.model.rows), default=0.0)
    if keep:
        write_solution(report, out / "solution.csv")
        _write_csv(out / "costs.csv", ("term", "value"), report.costs.rows() + [("total", report.costs.total)])
    return report


# ------------------------------------------------------------------ flows and pressures

def pipe_flows(report: SolutionReport) -> dict[tuple[str, str, str], tuple[float, float, float]]:
    """(pipe, rp, k) -> (total, CH4, H2) flow."""
    b, vals = report.builder, report.values
    out = {}
    for p in b.system.pipelines:
        for rp, k in b.steps():
            out[(p.id, rp, k)] = tuple(vals[b.v(s, p.id, rp, k).name] for s in ("fgas", "fch4", "fh2"))
    return out


def implied_pressures(report: SolutionReport, rp, k) -> dict[str, float]:
    """Squared pressures consistent with the flows of one sub-period.

    Used for formulations that carry no pressure variables. Pressures obey
    the Weymouth relation on every pipe, the compressor limits and the
    lower bounds, and the total excess over the node MOPs is minimised.
    A pipe whose relation cannot be met (loops with inconsistent flows)
    gets a heavily penalised slack.
    """
    b = report.builder
    sysm = b.system
    nodes = [n.id for n in sysm.nodes]
    if not nodes:
        return {}
    idx = {n: i for i, n in enumerate(nodes)}
    nn, npipe = len(nodes), len(sysm.pipelines)
    # columns: psqr (nn), excess (nn), slack+ (npipe), slack- (npipe)
    ncol = 2 * nn + 2 * npipe
    scale = max((n.p_max_sqr for n in sysm.nodes), default=1.0)
    c = np.zeros(ncol)
    c[nn:2 * nn] = 1.0
    c[2 * nn:] = 1e3
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for j, p in enumerate(sysm.pipelines):
        f = report.values[b.v("fgas", p.id, rp, k).name]
        if not p.existing and report.values.get(b.v("xpipe", p.id).name, 0.0) < 0.5:
            continue
        row = np.zeros(ncol)
        row[idx[p.from_node]] += p.r_gas
        row[idx[p.to_node]] -= p.r_gas
        # slack measured in squared-pressure units so it always costs more than MOP excess
        row[2 * nn + j] = p.r_gas
        row[2 * nn + npipe + j] = -p.r_gas
        a_eq.append(row)
        b_eq.append(f * abs(f))
    for cmp in sysm.compressors:
        inlet = sysm.node(cmp.from_node)
        boost = inlet.p_max_sqr - (math.sqrt(inlet.p_max_sqr) - cmp.max_boost) ** 2
        i, o = idx[cmp.from_node], idx[cmp.to_node]
        for coef_in, coef_out, rhs in ((-cmp.ratio_sqr, 1.0, 0.0), (1.0, -1.0, 0.0), (-1.0, 1.0, boost)):
            row = np.zeros(ncol)
            row[i] += coef_in
            row[o] += coef_out
            a_ub.append(row)
            b_ub.append(rhs)
    for n in sysm.nodes:
        row = np.zeros(ncol)
        row[idx[n.id]] = 1.0
        row[nn + idx[n.id]] = -1.0
        a_ub.append(row)
        b_ub.append(n.p_max_sqr)
    bounds = [(n.p_min_sqr, None) for n in sysm.nodes] + [(0, None)] * (nn + 2 * npipe)
    res = linprog(
        c,
        A_ub=np.array(a_ub) / scale if a_ub else None, b_ub=np.array(b_ub) / scale if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None, b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds, method="highs",
    )
    if res.status != 0:
        return {n: math.nan for n in nodes}
    return {n: float(res.x[idx[n]]) for n in nodes}


def node_pressures(report: SolutionReport, rp, k) -> tuple[dict[str, float], str]:
    """Squared pressures for one sub-period and where they came from."""
    b = report.builder
    if b.system.nodes and b.has("psqr", b.system.nodes[0].id, rp, k):
        return {n.id: report.value("psqr", n.id, rp, k) for n in b.system.nodes}, "model"
    return implied_pressures(report, rp, k), "implied"


def pressure_profile(report: SolutionReport, path: list[str] | None = None,
                     csv_path: str | Path | None = None) -> list[tuple]:
    """Rows ``(node, rp, k, pressure_bar, lb_bar, mop_bar, source)`` along ``path``.

    ``path`` defaults to every node in declaration order.
    """
    b = report.builder
    nodes = path if path is not None else [n.id for n in b.system.nodes]
    for n in nodes:
        b.system.node(n)
    rows = []
    for rp, k in b.steps():
        psqr, src = node_pressures(report, rp, k)
        for n in nodes:
            node = b.system.node(n)
            val = psqr[n]
            bar = math.sqrt(val) if val >= 0 else math.nan
            rows.append((n, rp, k, bar, node.lb_bar, node.mop_bar, src))
    if csv_path is not None:
        _write_csv(Path(csv_path), ("node", "rp", "k", "pressure_bar", "lb_bar", "mop_bar", "source"), rows)
    return rows


# ------------------------------------------------------------------ violations

@dataclass(frozen=True, order=True)
class Violation:
    kind: str
    entity: str
    rp: str
    k: str
    amount: float


def detect_violations(report: SolutionReport, kinds=VIOLATION_KINDS) -> list[Violation]:
    """Physical inconsistencies in a solved point, sorted.

    ``sign``: CH4 and H2 moving in opposite directions in one pipe.
    ``blend``: H2 above the blend limit relative to CH4 in a pipe.
    ``mop``: node pressure above its maximum operating pressure.
    ``balance``: a nodal balance row not met.
    ``direction``: a pipe whose flow reverses inside one representative period.
    """
    unknown = set(kinds) - set(VIOLATION_KINDS)
    if unknown:
        raise ConfigError(f"unknown violation kinds {sorted(unknown)}")
    if not report.ok:
        raise ConfigError(f"cannot inspect a run with status {report.status}")
    b = report.builder
    bmax = b.cfg.blend_max
    flows = pipe_flows(report)
    found: list[Violation] = []
    if "sign" in kinds or "blend" in kinds:
        for (pid, rp, k), (_, ch4, h2) in flows.items():
            if "sign" in kinds and ch4 * h2 < 0 and min(abs(ch4), abs(h2)) > FLOW_TOL:
                found.append(Violation("sign", pid, rp, k, min(abs(ch4), abs(h2))))
            excess = abs(h2) - bmax * abs(ch4)
            if "blend" in kinds and excess > FLOW_TOL:
                found.append(Violation("blend", pid, rp, k, excess))
    if "direction" in kinds:
        for p in b.system.pipelines:
            for rp in b.ts.rep_periods:
                signs = {math.copysign(1, flows[(p.id, rp, k)][0]) for k in b.ts.sub_periods
                         if abs(flows[(p.id, rp, k)][0]) > FLOW_TOL}
                if len(signs) > 1:
                    swing = max(abs(flows[(p.id, rp, k)][0]) for k in b.ts.sub_periods)
                    found.append(Violation("direction", p.id, rp, "", swing))
    if "mop" in kinds:
        for rp, k in b.steps():
            psqr, _ = node_pressures(report, rp, k)
            for n in b.system.nodes:
                val = psqr[n.id]
                if math.isnan(val):
                    found.append(Violation("mop", n.id, rp, k, math.inf))
                    continue
                over = math.sqrt(max(val, 0.0)) - n.mop_bar
                if over > PRESSURE_TOL:
                    found.append(Violation("mop", n.id, rp, k, over))
    if "balance" in kinds:
        rev_rp = {code: rp for rp, code in b.rp_code.items()}
        rev_k = {code: k for k, code in b.k_code.items()}
        for row in b.model.rows:
            if not row.name.startswith("bal_"):
                continue
            res = b.model.row_residual(row, report.values)
            if res > FLOW_TOL:
                _, rpc, kc, ent = row.name.split("__", 3)
                found.append(Violation("balance", ent, rev_rp.get(rpc, rpc), rev_k.get(kc, kc), res))
    return sorted(found)


def write_violations(violations: list[Violation], path: str | Path) -> Path:
    return _write_csv(Path(path), ("kind", "entity", "rp", "k", "amount"),
                      ((v.kind, v.entity, v.rp, v.k, v.amount) for v in violations))


# ------------------------------------------------------------------ audits

def h2_deployment(report: SolutionReport) -> float:
    """Hydrogen reaching end uses over the year, served or not."""
    b = report.builder
    dem = b.system.demand
    dedicated = math.fsum(b.weight(rp, k) * dem.h2_dedicated.get((rp, k, n, cl), 0.0)
                          for rp, k in b.steps() for n, cl in dem.node_classes())
    fuel_cells = math.fsum(b.weight(rp, k) * report.value("csh2", u.id, rp, k)
                           for u in b.system.units_of("fuel_cell") for rp, k in b.steps())
    burnt = report.weighted_total("cs_h2_e") + report.weighted_total("cs_h2_aux")
    return dedicated + report.weighted_total("d_h2") + burnt + fuel_cells


@dataclass
class RegretReport:
    plan: SolutionReport
    audit: SolutionReport
    h2ns_total: float = 0.0
    ch4ns_total: float = 0.0
    h2ns_share: float = 0.0
    mop_violations: list[Violation] = field(default_factory=list)
    plan_mop_violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.audit.ok

    @property
    def cost_delta(self) -> float:
        if not (self.plan.ok and self.audit.ok):
            return math.nan
        return self.audit.objective - self.plan.objective

    def summary_rows(self):
        return [
            ("plan_formulation", self.plan.formulation),
            ("audit_formulation", self.audit.formulation),
            ("audit_status", self.audit.status),
            ("plan_objective", self.plan.objective),
            ("audit_objective", self.audit.objective),
            ("cost_delta", self.cost_delta),
            ("h2ns_total", self.h2ns_total),
            ("h2ns_share", self.h2ns_share),
            ("ch4ns_total", self.ch4ns_total),
            ("mop_violations", len(self.mop_violations)),
            ("plan_mop_violations", len(self.plan_mop_violations)),
        ]


def audit_fixed_investments(plan: SolutionReport, system: EnergySystem, ts: TemporalStructure,
                            cfg_audit: ScenarioConfig, out_dir: str | Path | None = None) -> RegretReport:
    """Re-operate the investments of ``plan`` under ``cfg_audit``.

    Every investment variable of the audit model must have a planned value;
    a missing one raises :class:`AuditError`.
    """
    if not plan.ok:
        raise AuditError(f"plan run has status {plan.status}; nothing to audit")
    fixed = plan.investments()
    cfg_audit = cfg_audit.replace(mode="operate_fixed")
    audit = run_scenario(system, ts, cfg_audit, out_dir=out_dir, fixed=fixed)
    rep = RegretReport(plan, audit)
    if plan.builder.system.nodes:
        rep.plan_mop_violations = detect_violations(plan, ("mop",))
    if audit.ok:
        rep.h2ns_total = audit.weighted_total("h2ns")
        rep.ch4ns_total = audit.weighted_total("ch4ns")
        total = h2_deployment(audit)
        rep.h2ns_share = rep.h2ns_total / total if total > 0 else 0.0
        rep.mop_violations = detect_violations(audit, ("mop",))
    if out_dir is not None:
        _write_csv(Path(out_dir) / "regret.csv", ("quantity", "value"), rep.summary_rows())
    return rep
