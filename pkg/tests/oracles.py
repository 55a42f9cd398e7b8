"""Independent reference computations used by several test modules."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog

from h2blend.backend.model import INTEGER, BINARY


def colebrook(re: float, rel_rough: float) -> float:
    """Implicit Colebrook-White equation solved by fixed-point iteration on 1/sqrt(lambda)."""
    x = 8.0
    for _ in range(200):
        x_new = -2.0 * math.log10(rel_rough / 3.7 + 2.51 * x / re)
        if abs(x_new - x) < 1e-14:
            break
        x = x_new
    return 1.0 / x**2


# variables created per unit and per time step, by kind (storage levels counted separately)
PER_STEP = {
    "gas_well": 1,        # production
    "ng_storage": 2,      # withdrawal, injection
    "smr_ccs": 2,         # gas use, hydrogen output
    "thermal_gas": 7,     # output, four fuel streams, commitment, start-up
    "thermal_other": 3,   # output, commitment, start-up
    "renewable": 1,
    "bess": 3,            # discharge, charge, state of charge
    "electrolyzer": 2,
    "fuel_cell": 2,
    "h2_tank": 2,
    "h2_cavern": 2,
}
LONG_TERM = ("h2_cavern", "ng_storage")
STORES = ("h2_tank", "h2_cavern", "ng_storage")


def expected_counts(system, ts, cfg) -> tuple[int, int]:
    """(variables, discrete variables) implied by the component inventory."""
    steps = len(ts.rep_periods) * len(ts.sub_periods)
    n_rp = len(ts.rep_periods)
    mow = cfg.mow or ts.mow
    n_cls = len(system.demand.node_classes())
    P, C, N = len(system.pipelines), len(system.compressors), len(system.nodes)
    # unserved power per bus; angles only exist when there is a line network
    angles = len(system.buses) if system.lines else 0
    per_step = len(system.buses) + angles + len(system.lines) + 4 * n_cls + 3 * P + 2 * C
    inter_levels = 0
    for u in system.units:
        per_step += PER_STEP[u.kind]
        if u.kind in STORES:
            inter = u.kind in LONG_TERM and (
                cfg.long_term_storage == "inter"
                or (cfg.long_term_storage == "auto" and not ts.is_full_chronology))
            if inter:
                inter_levels += ts.n_periods // mow
            else:
                per_step += 1
    cand = sum(not ln.existing for ln in system.lines) + sum(not p.existing for p in system.pipelines)
    n_vars = steps * per_step + len(system.units) + cand + inter_levels
    thermals = sum(u.kind in ("thermal_gas", "thermal_other") for u in system.units)
    n_disc = 2 * steps * thermals + cand + sum(u.kind not in cfg.continuous_invest for u in system.units)
    if cfg.flow_formulation in ("btp", "bpp"):
        n_vars += P * n_rp
        n_disc += P * n_rp
    if cfg.flow_formulation == "bpp":
        n = cfg.n_increments
        n_vars += steps * (N + P * (1 + 2 * n))
        n_disc += steps * P * n
    return n_vars, n_disc


def enumerate_investments(model, invest_names):
    """Best objective over every integer investment vector, one LP per vector.

    Operational variables must all be continuous.
    """
    c, a_ub, b_ub, a_eq, b_eq, bounds, integrality, const = model.as_matrices()
    col = {v.name: i for i, v in enumerate(model.variables)}
    inv_cols = [col[n] for n in invest_names]
    assert all(integrality[i] == 0 for i in range(len(c)) if i not in inv_cols), "operations must be LP"
    ranges = []
    for n in invest_names:
        v = model.var(n)
        assert v.kind in (INTEGER, BINARY)
        ranges.append(range(int(math.ceil(v.lb)), int(math.floor(v.ub)) + 1))
    best, best_vec, n_lp = math.inf, None, 0
    for vec in itertools.product(*ranges):
        bnds = list(bounds)
        for i, x in zip(inv_cols, vec):
            bnds[i] = (x, x)
        res = linprog(c, A_ub=a_ub if a_ub.shape[0] else None, b_ub=b_ub if a_ub.shape[0] else None,
                      A_eq=a_eq if a_eq.shape[0] else None, b_eq=b_eq if a_eq.shape[0] else None,
                      bounds=bnds, method="highs")
        n_lp += 1
        if res.status == 0 and res.fun + const < best:
            best, best_vec = res.fun + const, dict(zip(invest_names, vec))
    return best, best_vec, n_lp


def blend_split(d_gas: float, h_ch4: float, h_h2: float, share: float, resolution: int = 2_000_001):
    """Scan d_ch4 on a fine grid with d_h2 = share * d_ch4; return the pair with the smallest energy mismatch."""
    d_ch4 = np.linspace(0.0, d_gas, resolution)
    mismatch = np.abs(d_ch4 * h_ch4 + share * d_ch4 * h_h2 - d_gas * h_ch4)
    i = int(np.argmin(mismatch))
    return float(d_ch4[i]), float(share * d_ch4[i])
