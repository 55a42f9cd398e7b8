"""LP and MPS emission.

Output depends only on insertion order and exact float values, so the same
model always gives the same bytes. The objective constant is not written
(several solvers ignore it); the solver drivers add it back.
"""

from __future__ import annotations

import io
import math
import re
from pathlib import Path

from ..errors import EmissionError
from .model import BINARY, INTEGER, ModelInstance

_LP_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")
_LINE_WIDTH = 200


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _check_names(model: ModelInstance, max_len: int | None = None) -> None:
    seen = set()
    for kind, names in (("variable", (v.name for v in model.variables)), ("row", (r.name for r in model.rows))):
        for n in names:
            if not _LP_NAME.match(n):
                raise EmissionError(f"{kind} name {n!r} is not a legal identifier")
            if max_len is not None and len(n) > max_len:
                raise EmissionError(f"{kind} name {n!r} exceeds {max_len} characters")
            if n == "obj":
                raise EmissionError("the name 'obj' is reserved for the objective row")
    for v in model.variables:
        if v.name in seen:
            raise EmissionError(f"variable name collision: {v.name}")
        seen.add(v.name)
    seen.clear()
    for r in model.rows:
        if r.name in seen:
            raise EmissionError(f"row name collision: {r.name}")
        seen.add(r.name)


def _lp_terms(head: str, coefs, names) -> str:
    """Linear expression text, wrapped to stay under the line-length limit."""
    if not coefs:
        return f"{head} 0 {names[0]}"
    lines = []
    line = head
    for i, (j, c) in enumerate(coefs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        tok = f"{sign} {names[j]}" if mag == 1 else f"{sign} {_num(mag)} {names[j]}"
        if i == 0 and sign == "+":
            tok = tok[2:]
        if len(line) + len(tok) + 1 > _LINE_WIDTH:
            lines.append(line)
            line = "   "
        line += " " + tok
    lines.append(line)
    return "\n".join(lines)


def to_lp(model: ModelInstance) -> str:
    _check_names(model)
    names = [v.name for v in model.variables]
    out = io.StringIO()
    out.write(f"\\ {model.name}\n")
    out.write("Minimize\n")
    obj = model.objective()
    coefs = [(i, c) for i, c in obj.terms.items() if c != 0.0]
    out.write(_lp_terms(" obj:", coefs, names) + "\n")
    out.write("Subject To\n")
    for r in model.rows:
        out.write(f"{_lp_terms(f' {r.name}:', r.coefs, names)} {r.sense} {_num(r.rhs)}\n")
    out.write("Bounds\n")
    for v in model.variables:
        lo, hi = v.lb, v.ub
        if v.kind in (BINARY, INTEGER):
            out.write(f" {_num(lo)} <= {v.name} <= {_num(hi)}\n")
        elif lo == hi:
            out.write(f" {v.name} = {_num(lo)}\n")
        elif math.isinf(lo) and math.isinf(hi):
            out.write(f" {v.name} free\n")
        elif math.isinf(lo):
            out.write(f" -inf <= {v.name} <= {_num(hi)}\n")
        elif math.isinf(hi):
            if lo != 0:
                out.write(f" {v.name} >= {_num(lo)}\n")
        else:
            out.write(f" {_num(lo)} <= {v.name} <= {_num(hi)}\n")
    ints = [v.name for v in model.variables if v.kind in (BINARY, INTEGER)]
    if ints:
        out.write("General\n")
        line = ""
        for n in ints:
            if len(line) + len(n) + 1 > _LINE_WIDTH:
                out.write(line + "\n")
                line = ""
            line += " " + n
        out.write(line + "\n")
    out.write("End\n")
    return out.getvalue()


_MPS_SENSE = {"<=": "L", ">=": "G", "=": "E"}


def _column_entries(model: ModelInstance):
    """Per variable, the (row name, coefficient) pairs in emission order."""
    names = [v.name for v in model.variables]
    col_rows: list[list[tuple[str, float]]] = [[] for _ in names]
    obj = model.objective()
    for i, c in obj.terms.items():
        if c != 0.0:
            col_rows[i].append(("obj", c))
    for r in model.rows:
        for i, c in r.coefs:
            col_rows[i].append((r.name, c))
    return names, col_rows


def _fmt_fixed(fields: tuple[str, ...]) -> str:
    # columns: 2-3, 5-12, 15-22, 25-36, 40-47, 50-61
    starts = (1, 4, 14, 24, 39, 49)
    line = ""
    for start, text in zip(starts, fields):
        if not text:
            continue
        line = line.ljust(start) + text
    return line.rstrip()


def _fixed_num(v: float) -> str:
    for digits in range(12, 0, -1):
        s = f"{v:.{digits}g}"
        if len(s) <= 12:
            return s
    raise EmissionError(f"cannot fit {v!r} into a fixed MPS field")


def to_mps(model: ModelInstance, fixed: bool = False) -> str:
    _check_names(model, max_len=8 if fixed else None)
    num = _fixed_num if fixed else _num
    names, col_rows = _column_entries(model)

    def rec(*fields):
        if fixed:
            return _fmt_fixed(fields) + "\n"
        return " " + " ".join(f for f in fields if f) + "\n"

    out = io.StringIO()
    # the FREE tag switches COIN readers (CBC) to free parsing; HiGHS ignores it
    out.write(f"NAME          {model.name[:8]}\n" if fixed else f"NAME          {model.name} FREE\n")
    out.write("ROWS\n")
    out.write(rec("N", "obj"))
    for r in model.rows:
        out.write(rec(_MPS_SENSE[r.sense], r.name))
    out.write("COLUMNS\n")
    in_int = False
    marker = 0
    for v, entries in zip(model.variables, col_rows):
        is_int = v.kind in (BINARY, INTEGER)
        if is_int != in_int:
            tag = "'INTORG'" if is_int else "'INTEND'"
            out.write(rec("", f"M{marker:07d}", "'MARKER'", "", tag))
            marker += 1
            in_int = is_int
        if not entries:
            # keep the column declared even without coefficients
            entries = [("obj", 0.0)]
        for rname, c in entries:
            out.write(rec("", v.name, rname, num(c)))
    if in_int:
        out.write(rec("", f"M{marker:07d}", "'MARKER'", "", "'INTEND'"))
    out.write("RHS\n")
    for r in model.rows:
        if r.rhs != 0.0:
            out.write(rec("", "RHS", r.name, num(r.rhs)))
    out.write("BOUNDS\n")
    for v in model.variables:
        lo, hi = v.lb, v.ub
        is_int = v.kind in (BINARY, INTEGER)
        if lo == hi:
            out.write(rec("FX", "BND", v.name, num(lo)))
            continue
        if math.isinf(lo) and math.isinf(hi):
            out.write(rec("FR", "BND", v.name))
            continue
        if math.isinf(lo):
            out.write(rec("MI", "BND", v.name))
        elif lo != 0 or is_int or (not math.isinf(hi) and hi < 0):
            out.write(rec("LO", "BND", v.name, num(lo)))
        if not math.isinf(hi):
            out.write(rec("UP", "BND", v.name, num(hi)))
        elif is_int:
            out.write(rec("PL", "BND", v.name))
    out.write("ENDATA\n")
    return out.getvalue()


def emit(model: ModelInstance, path: str | Path, fmt: str | None = None) -> Path:
    """Write ``model`` to ``path``; format from ``fmt`` or the file suffix.

    ``fmt`` is one of ``lp``, ``mps`` (free) or ``fixed-mps``.
    """
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt == "lp":
        text = to_lp(model)
    elif fmt in ("mps", "free-mps"):
        text = to_mps(model, fixed=False)
    elif fmt == "fixed-mps":
        text = to_mps(model, fixed=True)
    else:
        raise EmissionError(f"unknown model format {fmt!r}")
    path.write_text(text)
    return path
