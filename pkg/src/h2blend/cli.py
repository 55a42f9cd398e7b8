"""Command line entry point: ``h2blend <command> CASE_DIR [options]``.

A case directory holds the system tables read by
:func:`h2blend.system.load_system`, the temporal tables ``gamma.csv``,
``weights_rp.csv`` and ``weights_k.csv``, and optionally ``config.txt``.
Flags override the values in ``config.txt``.

Exit status: 0 success, 1 infeasible or unsolved, 2 bad usage or bad
input, 3 solver environment problem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, cases
from .errors import H2BlendError, SolverEnvironmentError
from .physics import build_breakpoints, friction, max_capacity, pipeline_resistance
from .system import (
    ScenarioConfig,
    check_system,
    config_to_text,
    export_system,
    load_config,
    load_system,
    validate_attachments,
)
from .temporal import ANNUAL_DAYS, ANNUAL_HOURS, load_temporal, write_temporal

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_ENV = 0, 1, 2, 3

CASES = {
    "skeleton": cases.skeleton_case,
    "opposite-flow": cases.opposite_flow_case,
    "corridor": cases.corridor_case,
    "blending": cases.blending_case,
    "policy": cases.policy_case,
    "storage": cases.storage_case,
    "tank": cases.tank_case,
    "expansion-toy": cases.expansion_toy,
}


class UsageError(Exception):
    pass


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} is negative")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return value


def _scenario_flags(p: argparse.ArgumentParser, with_formulation: bool = True) -> None:
    p.add_argument("case", type=Path, help="case directory")
    if with_formulation:
        p.add_argument("--formulation", choices=("stp", "btp", "bpp"))
    p.add_argument("--blend-max", type=_fraction)
    p.add_argument("--kappa", type=_fraction)
    p.add_argument("--co2-price", type=_non_negative, help="M EUR per t CO2")
    p.add_argument("--gap", type=_non_negative, help="relative MILP gap")
    p.add_argument("--time-limit", type=_non_negative, help="seconds")
    p.add_argument("--increments", type=_positive_int, help="piecewise increments per pipeline")
    p.add_argument("--mow", type=_positive_int, help="moving window length for long-term storage")
    p.add_argument("--solver", choices=("highs", "cbc"))
    p.add_argument("--out-dir", type=Path)
    p.add_argument("--no-weight-check", action="store_true",
                   help="accept weights that do not add up to one year")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h2blend", description="Power, natural gas and hydrogen expansion planning.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="co-optimise investments and operation")
    _scenario_flags(p)

    p = sub.add_parser("operate", help="operate fixed investments taken from a solution.csv")
    _scenario_flags(p)
    p.add_argument("--investments", type=Path, required=True, help="solution.csv of a planning run")

    p = sub.add_parser("audit", help="plan with one flow model, then operate the plan under another")
    _scenario_flags(p, with_formulation=False)
    p.add_argument("--formulation", dest="formulation_conflict", help=argparse.SUPPRESS)
    p.add_argument("--plan-formulation", choices=("stp", "btp", "bpp"), default="btp")
    p.add_argument("--audit-formulation", choices=("stp", "btp", "bpp"), default="bpp")
    p.add_argument("--path", help="comma separated nodes for the pressure profile")

    p = sub.add_parser("physics", help="pipeline factors, capacities and breakpoint tables")
    p.add_argument("case", type=Path)
    p.add_argument("--increments", type=_positive_int, help="also print breakpoint tables")

    p = sub.add_parser("validate", help="check the inputs of a case without solving")
    p.add_argument("case", type=Path)
    p.add_argument("--no-weight-check", action="store_true")
    p.add_argument("--mow", type=_positive_int)

    p = sub.add_parser("export-case", help="write one of the bundled cases as a case directory")
    p.add_argument("name", choices=sorted(CASES))
    p.add_argument("directory", type=Path)
    return parser


# ------------------------------------------------------------------ helpers

def _load_case(args, need_temporal: bool = True):
    system = load_system(args.case)
    check_system(system)
    ts = None
    if need_temporal:
        targets = None if getattr(args, "no_weight_check", False) else (ANNUAL_DAYS, ANNUAL_HOURS)
        ts = load_temporal(args.case, targets=targets)
    cfg_path = args.case / "config.txt"
    cfg = load_config(cfg_path) if cfg_path.exists() else ScenarioConfig()
    return system, ts, cfg


def _apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    for flag, attr in (("formulation", "flow_formulation"), ("blend_max", "blend_max"), ("kappa", "kappa"),
                       ("co2_price", "c_co2"), ("gap", "milp_gap"), ("time_limit", "time_limit"),
                       ("increments", "n_increments"), ("mow", "mow"), ("solver", "solver")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[attr] = value
    return cfg.replace(**changes)


def _out_dir(args, default_name: str) -> Path:
    return args.out_dir if args.out_dir is not None else args.case / default_name


def _print_report(report: analysis.SolutionReport, out) -> None:
    print(f"formulation {report.formulation}", file=out)
    print(f"status {report.status}", file=out)
    if not report.ok:
        return
    print(f"objective {report.objective!r}", file=out)
    if report.solution.gap is not None:
        print(f"gap {report.solution.gap!r}", file=out)
    for term, value in report.costs.rows():
        print(f"  {term:<18} {value!r}", file=out)


# ------------------------------------------------------------------ commands

def cmd_plan(args, out) -> int:
    system, ts, cfg = _load_case(args)
    cfg = _apply_flags(cfg, args).replace(mode="plan")
    report = analysis.run_scenario(system, ts, cfg, out_dir=_out_dir(args, f"out_{cfg.flow_formulation}"))
    _print_report(report, out)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def cmd_operate(args, out) -> int:
    system, ts, cfg = _load_case(args)
    cfg = _apply_flags(cfg, args).replace(mode="operate_fixed")
    plan = analysis.read_solution(args.investments)
    report = analysis.run_scenario(system, ts, cfg, out_dir=_out_dir(args, f"operate_{cfg.flow_formulation}"),
                                   fixed=plan)
    _print_report(report, out)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def cmd_audit(args, out) -> int:
    if args.formulation_conflict is not None:
        raise UsageError("audit takes --plan-formulation and --audit-formulation, not --formulation")
    system, ts, cfg = _load_case(args)
    cfg = _apply_flags(cfg, args)
    path = args.path.split(",") if args.path else None
    unknown = sorted(set(path or ()) - {n.id for n in system.nodes})
    if unknown:
        raise UsageError(f"--path names unknown gas nodes {unknown}")
    root = _out_dir(args, f"audit_{args.plan_formulation}_{args.audit_formulation}")
    plan = analysis.run_scenario(system, ts, cfg.replace(flow_formulation=args.plan_formulation, mode="plan"),
                                 out_dir=root / "plan")
    print("[plan]", file=out)
    _print_report(plan, out)
    if not plan.ok:
        return EXIT_INFEASIBLE
    regret = analysis.audit_fixed_investments(plan, system, ts, cfg.replace(flow_formulation=args.audit_formulation),
                                              out_dir=root / "audit")
    print("[audit]", file=out)
    _print_report(regret.audit, out)
    for key, value in regret.summary_rows():
        print(f"{key} {value!r}" if isinstance(value, float) else f"{key} {value}", file=out)
    analysis.pressure_profile(plan, path, root / "plan" / "pressure_profile.csv")
    analysis.write_violations(analysis.detect_violations(plan), root / "plan" / "violations.csv")
    if regret.audit.ok:
        analysis.pressure_profile(regret.audit, path, root / "audit" / "pressure_profile.csv")
        analysis.write_violations(analysis.detect_violations(regret.audit), root / "audit" / "violations.csv")
    return EXIT_OK if regret.feasible else EXIT_INFEASIBLE


def cmd_physics(args, out) -> int:
    system = load_system(args.case)
    const = system.constants
    print("pipeline,length_km,diameter_m,reynolds,friction,r_computed,r_input,f_max_computed,f_max_input", file=out)
    for p in system.pipelines:
        fr = friction(p, const)
        r = pipeline_resistance(p, const, fr.lam)
        f_cap = max_capacity(r, system.node(p.from_node).p_max_sqr, system.node(p.to_node).p_min_sqr)
        print(f"{p.id},{p.length / 1000:g},{p.diameter:g},{fr.reynolds:.6g},{fr.lam:.6g},"
              f"{r:.6g},{p.r_gas:.6g},{f_cap:.6g},{p.f_max:.6g}", file=out)
    if args.increments:
        print(file=out)
        print("pipeline,breakpoint,flow,flow_abs_flow,max_chord_error", file=out)
        for p in system.pipelines:
            t = build_breakpoints(p.f_max, args.increments)
            for i, f, v in t.rows():
                print(f"{p.id},{i},{f:.6g},{v:.6g},{t.max_chord_error:.6g}", file=out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    system, ts, cfg = _load_case(args)
    if args.mow is not None:
        ts = ts.with_mow(args.mow)
    issues = validate_attachments(system)
    for unit_id, message in issues:
        print(f"{unit_id}: {message}", file=out)
    if issues:
        return EXIT_USAGE
    print(f"ok: {len(system.nodes)} gas nodes, {len(system.pipelines)} pipelines, {len(system.units)} units, "
          f"{ts.n_periods} periods", file=out)
    return EXIT_OK


def cmd_export_case(args, out) -> int:
    system, ts, cfg = CASES[args.name]()
    export_system(system, args.directory)
    write_temporal(ts, args.directory)
    (args.directory / "config.txt").write_text(config_to_text(cfg))
    annual = ts.total_weight() == ANNUAL_HOURS
    print(f"wrote {args.name} to {args.directory}", file=out)
    if not annual:
        print("weights do not cover a full year; pass --no-weight-check when loading", file=out)
    return EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "operate": cmd_operate,
    "audit": cmd_audit,
    "physics": cmd_physics,
    "validate": cmd_validate,
    "export-case": cmd_export_case,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"h2blend: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverEnvironmentError as exc:
        print(f"h2blend: solver environment: {exc}", file=sys.stderr)
        return EXIT_ENV
    except (H2BlendError, FileNotFoundError) as exc:
        print(f"h2blend: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
