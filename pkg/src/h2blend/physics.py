"""Steady-state pipeline physics and breakpoint tables for the flow linearization.

Units follow the model tables: flows in MSm3/h, pressures in bar, lengths
in m, diameters in m, roughness in mm. SI conversion happens only inside
:func:`pipeline_resistance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidArgument, NoFeasibleFlow, RegimeError

# (m3/s)^2 / Pa^2  ->  (MSm3/h)^2 / bar^2
_SI_TO_MODEL = 1e10 * (3600.0 / 1e6) ** 2
TURBULENT_RE = 4000.0


@dataclass(frozen=True)
class FrictionResult:
    reynolds: float
    lam: float


def reynolds(d: float, const) -> float:
    """Reynolds number from diameter (m) and the average gas state.

    ``const.eta_m`` is in 1e-6 kg/(m s), as in the parameter tables.
    """
    if d <= 0:
        raise InvalidArgument("diameter must be positive")
    if min(const.v_m, const.rho_m, const.eta_m) <= 0:
        raise InvalidArgument("velocity, density and viscosity must be positive")
    return d * const.v_m * const.rho_m / (const.eta_m * 1e-6)


def chen_friction(re: float, eps_mm: float, d: float) -> float:
    """Explicit Chen approximation of the Colebrook-White friction factor."""
    if d <= 0:
        raise InvalidArgument("diameter must be positive")
    if eps_mm < 0:
        raise InvalidArgument("roughness must be non-negative")
    if re <= TURBULENT_RE:
        raise RegimeError(f"Reynolds number {re:g} is not turbulent (needs > {TURBULENT_RE:g})")
    rr = (eps_mm / 1000.0) / d
    inner = rr**1.1098 / 2.8257 + 5.8506 / re**0.8981
    inv_sqrt = -2.0 * math.log10(rr / 3.7065 - 5.0425 / re * math.log10(inner))
    return 1.0 / inv_sqrt**2


def friction(pipe, const) -> FrictionResult:
    re = reynolds(pipe.diameter, const)
    return FrictionResult(re, chen_friction(re, pipe.roughness, pipe.diameter))


def pipeline_resistance(pipe, const, lam: float | None = None) -> float:
    """Pipeline factor R such that ``f|f| = R (p_in^2 - p_out^2)``.

    Result in (MSm3/h)^2 / bar^2.
    """
    if lam is None:
        lam = friction(pipe, const).lam
    if min(pipe.length, pipe.diameter, lam) <= 0:
        raise InvalidArgument("length, diameter and friction factor must be positive")
    p_n_pa = const.p_n * 1e5
    r_si = (
        (1.0 / lam)
        * pipe.diameter**5
        / pipe.length
        * math.pi**2
        / 16.0
        * (const.t_n / const.t_m)
        / p_n_pa
        / const.rho_n
        / const.k_m
    )
    return r_si * _SI_TO_MODEL


def max_capacity(r_gas: float, p_max_sqr_in: float, p_min_sqr_out: float) -> float:
    """Largest steady-state flow between an inlet at MOP and an outlet at its lower bound."""
    if r_gas <= 0:
        raise InvalidArgument("pipeline factor must be positive")
    drop = p_max_sqr_in - p_min_sqr_out
    if drop < 0:
        raise NoFeasibleFlow(
            f"inlet MOP^2 {p_max_sqr_in:g} is below outlet lower bound^2 {p_min_sqr_out:g}"
        )
    return math.sqrt(drop * r_gas)


def pipe_capacity(pipe, nodes) -> float:
    src, dst = nodes
    return max_capacity(pipe.r_gas, src.p_max_sqr, dst.p_min_sqr)


def calibrate_compressibility(const, pipe, target_r: float):
    """Return constants whose ``k_m`` reproduces ``target_r`` for ``pipe``.

    The tables publish R but not the full gas-state bundle, so one scalar
    is fitted. R is inversely proportional to ``k_m`` at fixed friction.
    """
    current = pipeline_resistance(pipe, const)
    return replace(const, k_m=const.k_m * current / target_r)


def chord_error(a: float, b: float) -> float:
    """Max deviation between ``f|f|`` and its chord on ``[a, b]``."""
    if not a < b:
        raise InvalidArgument("segment must satisfy a < b")
    fa, fb = a * abs(a), b * abs(b)
    slope = (fb - fa) / (b - a)

    def gap(f):
        return abs(fa + slope * (f - a) - f * abs(f))

    # stationary points of chord - f^2 (f > 0) and chord + f^2 (f < 0)
    cands = [a, b, 0.0, slope / 2.0, -slope / 2.0]
    return max(gap(f) for f in cands if a <= f <= b)


@dataclass(frozen=True)
class BreakpointTable:
    flows: np.ndarray
    values: np.ndarray

    @property
    def n_increments(self) -> int:
        return len(self.flows) - 1

    def segment_errors(self) -> np.ndarray:
        return np.array([chord_error(a, b) for a, b in zip(self.flows[:-1], self.flows[1:])])

    @property
    def max_chord_error(self) -> float:
        return float(self.segment_errors().max())

    def interpolate(self, f: float) -> float:
        return float(np.interp(f, self.flows, self.values))

    def rows(self):
        return [(i, float(f), float(v)) for i, (f, v) in enumerate(zip(self.flows, self.values), start=1)]


def build_breakpoints(f_max: float, n: int) -> BreakpointTable:
    """``n`` equal increments on ``[-f_max, f_max]`` with values ``F|F|``."""
    if n < 2:
        raise InvalidArgument("need at least two increments")
    if f_max <= 0:
        raise InvalidArgument("f_max must be positive")
    flows = np.linspace(-f_max, f_max, n + 1)
    if n % 2 == 0:
        flows[n // 2] = 0.0
    # exact odd symmetry regardless of linspace rounding
    half = (n + 1) // 2
    flows[n + 1 - half:] = -flows[:half][::-1]
    return BreakpointTable(flows=flows, values=flows * np.abs(flows))
