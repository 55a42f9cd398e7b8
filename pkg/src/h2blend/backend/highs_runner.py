"""Minimal stand-in for the ``highs`` command-line program.

Used when no HiGHS executable is installed but the ``highspy`` wheel is.
It accepts the subset of the CLI that :mod:`h2blend.backend.solvers` uses
and writes the same native solution file, so the driver treats both
paths identically::

    python -m h2blend.backend.highs_runner --options_file opts.txt \
        --solution_file model.sol model.mps
"""

from __future__ import annotations

import argparse
import sys


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="highs_runner")
    ap.add_argument("model_file")
    ap.add_argument("--options_file")
    ap.add_argument("--solution_file")
    ap.add_argument("--time_limit", type=float)
    args = ap.parse_args(argv)

    import highspy

    h = highspy.Highs()
    if args.options_file and h.readOptions(args.options_file) != highspy.HighsStatus.kOk:
        print(f"could not read options file {args.options_file}", file=sys.stderr)
        return 1
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.model_file) == highspy.HighsStatus.kError:
        print(f"could not read model file {args.model_file}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    print(f"Model status        : {h.modelStatusToString(status)}")
    if info.primal_solution_status:
        print(f"Objective value     : {info.objective_function_value!r}")
    if info.mip_node_count >= 0:
        print(f"Relative gap        : {info.mip_gap!r}")
    if args.solution_file:
        h.writeSolution(args.solution_file, 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
