"""Chronological periods, representative periods and their weights.

Three index sets are used throughout the model: chronological periods ``p``
(1-based integers), representative periods ``rp`` and sub-periods ``k``
within a representative period. ``gamma`` maps every ``p`` to one
``(rp, k)`` pair. Operational costs are weighted by ``w_rp[rp] * w_k[k]``.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import IncompleteMapping, InconsistentWeights, InvalidArgument

ANNUAL_DAYS = 365
ANNUAL_HOURS = 8760
WEIGHT_RTOL = 1e-9


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    # decimal text is exact; floats go through repr to keep what the user typed
    return Fraction(str(value).strip())


def _matches(total: Fraction, target: Fraction) -> bool:
    if total == target:
        return True
    return abs(float(total) - float(target)) <= WEIGHT_RTOL * abs(float(target))


@dataclass(frozen=True)
class TemporalStructure:
    n_periods: int
    rep_periods: tuple[str, ...]
    sub_periods: tuple[str, ...]
    gamma: tuple[tuple[str, str], ...]
    w_rp: Mapping[str, Fraction]
    w_k: Mapping[str, Fraction]
    mow: int
    _k_pos: Mapping[str, int] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_k_pos", {k: i for i, k in enumerate(self.sub_periods)})

    @property
    def is_full_chronology(self) -> bool:
        return (
            len(self.rep_periods) == 1
            and self.w_rp[self.rep_periods[0]] == 1
            and all(w == 1 for w in self.w_k.values())
        )

    def weight(self, rp: str, k: str) -> float:
        return float(self.w_rp[rp] * self.w_k[k])

    def total_weight(self) -> Fraction:
        return sum((self.w_rp[rp] * self.w_k[k] for rp in self.rep_periods for k in self.sub_periods), Fraction(0))

    def steps(self) -> Iterable[tuple[str, str]]:
        for rp in self.rep_periods:
            for k in self.sub_periods:
                yield rp, k

    def predecessor(self, rp: str, k: str) -> str | None:
        """Cyclic predecessor of ``k`` inside ``rp``.

        In full chronology the first period has no predecessor (the storage
        formulations anchor it to the initial reserve instead).
        """
        pos = self._k_pos[k]
        if pos > 0:
            return self.sub_periods[pos - 1]
        if self.is_full_chronology:
            return None
        return self.sub_periods[-1]

    def checkpoints(self) -> list[int]:
        return list(range(self.mow, self.n_periods + 1, self.mow))

    def with_mow(self, mow: int) -> "TemporalStructure":
        _check_mow(self.n_periods, mow)
        return TemporalStructure(self.n_periods, self.rep_periods, self.sub_periods, self.gamma, self.w_rp, self.w_k, mow)


def _check_mow(n_periods: int, mow: int) -> None:
    if mow < 1:
        raise InvalidArgument(f"moving window must be >= 1, got {mow}")
    if n_periods % mow:
        raise InvalidArgument(
            f"moving window {mow} leaves a partial final window over {n_periods} periods"
        )


def build_full_chronology(n_periods: int, mow: int | None = None) -> TemporalStructure:
    if n_periods < 1:
        raise InvalidArgument("n_periods must be >= 1")
    ks = tuple(f"k{i:0{len(str(n_periods))}d}" for i in range(1, n_periods + 1))
    mow = n_periods if mow is None else mow
    _check_mow(n_periods, mow)
    return TemporalStructure(
        n_periods=n_periods,
        rep_periods=("rp1",),
        sub_periods=ks,
        gamma=tuple(("rp1", k) for k in ks),
        w_rp={"rp1": Fraction(1)},
        w_k={k: Fraction(1) for k in ks},
        mow=mow,
    )


def build_representative(
    mapping: Sequence[tuple[int, str, str]],
    w_rp: Mapping[str, object],
    w_k: Mapping[str, object],
    targets: tuple[object, object] | None = (ANNUAL_DAYS, ANNUAL_HOURS),
    mow: int | None = None,
) -> TemporalStructure:
    """Validate a clustering result.

    ``mapping`` holds ``(p, rp, k)`` rows. ``targets`` are the required sums
    of ``w_rp`` and of ``w_rp * w_k``; pass scaled targets for toy years or
    ``None`` to skip the check.
    """
    if not mapping:
        raise IncompleteMapping("empty period mapping")
    by_p: dict[int, tuple[str, str]] = {}
    for p, rp, k in mapping:
        p = int(p)
        if p in by_p and by_p[p] != (rp, k):
            raise IncompleteMapping(f"period {p} mapped twice")
        by_p[p] = (str(rp), str(k))
    n = max(by_p)
    missing = [p for p in range(1, n + 1) if p not in by_p]
    if missing or min(by_p) < 1:
        raise IncompleteMapping(f"periods not covered by the mapping: {missing[:10]}")

    wrp = {str(r): _as_fraction(v) for r, v in w_rp.items()}
    wk = {str(k): _as_fraction(v) for k, v in w_k.items()}
    for label, weights in (("w_rp", wrp), ("w_k", wk)):
        bad = [key for key, v in weights.items() if v <= 0]
        if bad:
            raise InvalidArgument(f"{label} must be strictly positive: {bad}")

    used_rp = {rp for rp, _ in by_p.values()}
    used_k = {k for _, k in by_p.values()}
    if used_rp - wrp.keys():
        raise IncompleteMapping(f"representative periods without weight: {sorted(used_rp - wrp.keys())}")
    if used_k - wk.keys():
        raise IncompleteMapping(f"sub-periods without weight: {sorted(used_k - wk.keys())}")

    if targets is not None:
        days, hours = (_as_fraction(t) for t in targets)
        sum_rp = sum(wrp.values(), Fraction(0))
        sum_h = sum((a * b for a in wrp.values() for b in wk.values()), Fraction(0))
        if not _matches(sum_rp, days):
            raise InconsistentWeights(f"sum of representative weights is {sum_rp}, expected {days}")
        if not _matches(sum_h, hours):
            raise InconsistentWeights(f"weighted hours sum to {sum_h}, expected {hours}")

    rps = tuple(wrp)
    ks = tuple(wk)
    mow = len(ks) if mow is None else mow
    _check_mow(n, mow)
    return TemporalStructure(
        n_periods=n,
        rep_periods=rps,
        sub_periods=ks,
        gamma=tuple(by_p[p] for p in range(1, n + 1)),
        w_rp=wrp,
        w_k=wk,
        mow=mow,
    )


def window_members(ts: TemporalStructure, p: int) -> list[tuple[str, str, int]]:
    """(rp, k, multiplicity) for the periods in the window ``(p - mow, p]``."""
    if p < ts.mow or p > ts.n_periods or p % ts.mow:
        raise InvalidArgument(f"period {p} is not a checkpoint of a {ts.mow}-period window")
    counts = Counter(ts.gamma[pp - 1] for pp in range(p - ts.mow + 1, p + 1))
    return [(rp, k, n) for (rp, k), n in counts.items()]


def load_temporal(directory: str | Path, targets=(ANNUAL_DAYS, ANNUAL_HOURS), mow: int | None = None) -> TemporalStructure:
    """Read ``gamma.csv`` (p,rp,k), ``weights_rp.csv`` (rp,w_rp), ``weights_k.csv`` (k,w_k)."""
    d = Path(directory)
    with open(d / "gamma.csv", newline="") as fh:
        mapping = [(int(r["p"]), r["rp"], r["k"]) for r in csv.DictReader(fh)]
    with open(d / "weights_rp.csv", newline="") as fh:
        w_rp = {r["rp"]: r["w_rp"] for r in csv.DictReader(fh)}
    with open(d / "weights_k.csv", newline="") as fh:
        w_k = {r["k"]: r["w_k"] for r in csv.DictReader(fh)}
    return build_representative(mapping, w_rp, w_k, targets=targets, mow=mow)


def write_temporal(ts: TemporalStructure, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "gamma.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "rp", "k"])
        for p, (rp, k) in enumerate(ts.gamma, start=1):
            w.writerow([p, rp, k])
    with open(d / "weights_rp.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rp", "w_rp"])
        for rp in ts.rep_periods:
            w.writerow([rp, ts.w_rp[rp]])
    with open(d / "weights_k.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "w_k"])
        for k in ts.sub_periods:
            w.writerow([k, ts.w_k[k]])
