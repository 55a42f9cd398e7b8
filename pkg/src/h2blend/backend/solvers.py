"""Drive an external MILP solver on an emitted model file and read back the result.

Two drivers exist. ``highs`` runs a HiGHS executable (``$H2BLEND_HIGHS``,
then ``highs`` on ``PATH``) and falls back to the bundled runner module
when only the Python wheel is installed. ``cbc`` runs COIN-OR CBC
(``$H2BLEND_CBC``, ``cbc`` on ``PATH``, then the binary shipped with
PuLP). CBC prints only about eight significant digits, so HiGHS is the
default whenever tight residual checks follow the solve.
"""

from __future__ import annotations

import math
import os
import re
import shutil
import subprocess
import sys
import tempfile
import time
import warnings
from pathlib import Path

from ..errors import ProtocolError, SolverEnvironmentError
from .model import ModelInstance, Solution
from .writers import emit

GAP_EPS = 1e-6
_HIGHS_STATUS = {
    "optimal": "optimal",
    "infeasible": "infeasible",
    "unbounded": "unbounded",
    "primal infeasible or unbounded": "infeasible",
    "unbounded or infeasible": "infeasible",
}


def _highs_command() -> list[str]:
    exe = os.environ.get("H2BLEND_HIGHS") or shutil.which("highs")
    if exe:
        return [exe]
    try:
        import highspy  # noqa: F401
    except ImportError as exc:
        raise SolverEnvironmentError(
            "HiGHS not found: set H2BLEND_HIGHS, put 'highs' on PATH or install highspy"
        ) from exc
    return [sys.executable, "-m", "h2blend.backend.highs_runner"]


def _cbc_command() -> list[str]:
    exe = os.environ.get("H2BLEND_CBC") or shutil.which("cbc")
    if exe:
        return [exe]
    try:
        import pulp

        with warnings.catch_warnings():
            # newer pulp flags the bundled binary as deprecated; it is still the only one shipped
            warnings.simplefilter("ignore", DeprecationWarning)
            exe = pulp.PULP_CBC_CMD().path
    except Exception as exc:  # pulp missing or broken install
        raise SolverEnvironmentError("CBC not found: set H2BLEND_CBC or install pulp") from exc
    if not exe or not os.path.exists(exe):
        raise SolverEnvironmentError("CBC not found: set H2BLEND_CBC or install pulp")
    return [exe]


def available_drivers() -> list[str]:
    out = []
    for name, finder in (("highs", _highs_command), ("cbc", _cbc_command)):
        try:
            finder()
            out.append(name)
        except SolverEnvironmentError:
            pass
    return out


def _run(cmd: list[str], timeout: float) -> subprocess.CompletedProcess:
    env = dict(os.environ)
    src_root = str(Path(__file__).resolve().parents[2])
    env["PYTHONPATH"] = src_root + os.pathsep + env.get("PYTHONPATH", "")
    try:
        return subprocess.run(cmd, capture_output=True, text=True, timeout=timeout, env=env)
    except FileNotFoundError as exc:
        raise SolverEnvironmentError(f"cannot execute {cmd[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise ProtocolError(f"solver did not return within {timeout:.0f} s") from exc


# ------------------------------------------------------------------ HiGHS

def parse_highs_solution(text: str) -> tuple[str, float | None, dict[str, float]]:
    """Parse a HiGHS native (style 0) solution file.

    Returns the raw model status string, the objective and column values.
    """
    lines = text.splitlines()
    try:
        i = lines.index("Model status")
        raw_status = lines[i + 1].strip()
    except (ValueError, IndexError) as exc:
        raise ProtocolError("solution file has no 'Model status' block") from exc
    objective = None
    values: dict[str, float] = {}
    j = i + 2
    while j < len(lines):
        line = lines[j]
        if line.startswith("Objective "):
            try:
                objective = float(line.split()[1])
            except (IndexError, ValueError) as exc:
                raise ProtocolError(f"bad objective line {line!r}") from exc
        elif line.startswith("# Columns "):
            n = int(line.split()[2])
            for k in range(n):
                parts = lines[j + 1 + k].split()
                if len(parts) != 2:
                    raise ProtocolError(f"bad column line {lines[j + 1 + k]!r}")
                values[parts[0]] = float(parts[1])
            j += n
        elif line.startswith("# Rows") or line.startswith("# Dual"):
            break
        j += 1
    return raw_status, objective, values


_GAP_LINE = re.compile(r"^\s*(?:Relative gap\s*:\s*(\S+)|Gap\s+(\S+)%)", re.M)


def _highs_gap(log: str) -> float | None:
    found = None
    for m in _GAP_LINE.finditer(log):
        text = m.group(1) or m.group(2)
        try:
            val = float(text)
        except ValueError:
            val = math.inf
        found = val if m.group(1) else val / 100.0
    return found


def _solve_highs(path: Path, gap: float, time_limit: float, workdir: Path) -> Solution:
    opts = workdir / f"{path.stem}.highs_options"
    sol = workdir / f"{path.stem}.sol"
    opts.write_text(f"mip_rel_gap = {gap!r}\ntime_limit = {float(time_limit)!r}\nrandom_seed = 0\nthreads = 1\n")
    if sol.exists():
        sol.unlink()
    cmd = _highs_command() + ["--options_file", str(opts), "--solution_file", str(sol), str(path)]
    t0 = time.perf_counter()
    proc = _run(cmd, timeout=time_limit + 120)
    wall = time.perf_counter() - t0
    log = proc.stdout + proc.stderr
    if proc.returncode != 0 and not sol.exists():
        raise ProtocolError(f"HiGHS exited with code {proc.returncode}: {log[-2000:]}")
    if not sol.exists():
        raise ProtocolError("HiGHS produced no solution file")
    raw, objective, values = parse_highs_solution(sol.read_text())
    key = raw.lower()
    reported_gap = _highs_gap(log)
    if key == "optimal":
        status = "optimal" if reported_gap is None or reported_gap <= GAP_EPS else "gap_reached"
    elif key in _HIGHS_STATUS:
        status = _HIGHS_STATUS[key]
    elif "limit" in key:
        status = "gap_reached" if values else "error"
    else:
        status = "error"
    if status in ("infeasible", "unbounded", "error"):
        objective, values = None, {}
    return Solution(status, objective, reported_gap, values, wall, log)


# ------------------------------------------------------------------ CBC

def parse_cbc_solution(text: str) -> tuple[str, float | None, dict[str, float]]:
    lines = text.splitlines()
    if not lines:
        raise ProtocolError("empty CBC solution file")
    head = lines[0].strip()
    m = re.search(r"objective value\s+(\S+)", head)
    objective = float(m.group(1)) if m else None
    # "-printingOptions all" lists rows first, then columns; each block
    # restarts its running index at 0, so the last block holds the columns
    blocks: list[dict[str, float]] = []
    for line in lines[1:]:
        parts = line.replace("**", " ").split()
        if not parts:
            continue
        if len(parts) < 3:
            raise ProtocolError(f"bad CBC value line {line!r}")
        if parts[0] == "0" or not blocks:
            blocks.append({})
        blocks[-1][parts[1]] = float(parts[2])
    values = blocks[-1] if blocks else {}
    return head, objective, values


def _solve_cbc(path: Path, gap: float, time_limit: float, workdir: Path) -> Solution:
    sol = workdir / f"{path.stem}.cbc.sol"
    if sol.exists():
        sol.unlink()
    cmd = _cbc_command() + [
        str(path), "-ratio", repr(gap), "-sec", repr(float(time_limit)),
        "-threads", "1", "-printingOptions", "all", "-solve", "-solu", str(sol),
    ]
    t0 = time.perf_counter()
    proc = _run(cmd, timeout=time_limit + 120)
    wall = time.perf_counter() - t0
    log = proc.stdout + proc.stderr
    if not sol.exists():
        raise ProtocolError(f"CBC produced no solution file (exit {proc.returncode}): {log[-2000:]}")
    head, objective, values = parse_cbc_solution(sol.read_text())
    low = head.lower()
    if low.startswith("optimal"):
        status = "optimal"
    elif "infeasible" in low:
        status = "infeasible"
    elif "unbounded" in low:
        status = "unbounded"
    elif low.startswith("stopped") and objective is not None:
        status = "gap_reached"
    else:
        status = "error"
    m = re.search(r"Gap:\s+(\S+)", log)
    reported_gap = float(m.group(1)) if m else None
    if status in ("infeasible", "unbounded", "error"):
        objective, values = None, {}
    return Solution(status, objective, reported_gap, values, wall, log)


_DRIVERS = {"highs": _solve_highs, "cbc": _solve_cbc}


def solve_file(path: str | Path, gap: float = 0.0, time_limit: float = 600.0, driver: str = "highs",
               workdir: str | Path | None = None, offset: float = 0.0) -> Solution:
    """Solve an LP/MPS file; ``offset`` is added to the reported objective."""
    if driver not in _DRIVERS:
        raise SolverEnvironmentError(f"unknown solver driver {driver!r}; choose from {sorted(_DRIVERS)}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    workdir = Path(workdir) if workdir is not None else path.parent
    sol = _DRIVERS[driver](path, gap, time_limit, workdir)
    if sol.objective is not None:
        sol.objective += offset
    return sol


def solve(model: ModelInstance, gap: float = 0.0, time_limit: float = 600.0, driver: str = "highs",
          workdir: str | Path | None = None, fmt: str | None = None) -> Solution:
    """Emit ``model`` and solve it. Values are keyed by variable name.

    Variables missing from the solver output (CBC may drop unused columns)
    are filled with 0 when 0 lies inside their bounds.
    """
    fmt = fmt or ("lp" if driver == "cbc" else "mps")
    suffix = {"lp": ".lp", "mps": ".mps", "fixed-mps": ".mps"}[fmt]
    if workdir is None:
        with tempfile.TemporaryDirectory(prefix="h2blend_") as tmp:
            return solve(model, gap, time_limit, driver, tmp, fmt)
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    path = emit(model, workdir / f"{model.name}{suffix}", fmt)
    sol = solve_file(path, gap, time_limit, driver, workdir, offset=model.objective().const)
    if sol.ok:
        for v in model.variables:
            if v.name not in sol.values and v.lb <= 0.0 <= v.ub:
                sol.values[v.name] = 0.0
        missing = [v.name for v in model.variables if v.name not in sol.values]
        if missing:
            raise ProtocolError(f"solver output lacks {len(missing)} variables, e.g. {missing[0]}")
    return sol
