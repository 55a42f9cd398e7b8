import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from h2blend.cases import BAR_LB, BAR_MOP, SKELETON_PIPES, reference_constants, regenerate_pipe_table, skeleton_pipe
from h2blend.errors import InvalidArgument, NoFeasibleFlow, RegimeError
from h2blend.physics import (
    build_breakpoints,
    calibrate_compressibility,
    chen_friction,
    chord_error,
    max_capacity,
    pipeline_resistance,
    reynolds,
)
from h2blend.system import GasConstants
from oracles import colebrook


def test_colebrook_oracle_smooth_pipe_reference():
    # Moody chart reading for a smooth pipe at Re = 1e5: lambda ~ 0.0180
    assert colebrook(1e5, 0.0) == pytest.approx(0.01799, abs=2e-4)


def test_chen_matches_colebrook_on_grid():
    d = 0.6
    worst = 0.0
    for re in np.logspace(np.log10(5e3), 8, 10):
        for rr in np.logspace(-6, -2, 10):
            lam = chen_friction(re, rr * d * 1000.0, d)
            worst = max(worst, abs(lam / colebrook(re, rr) - 1))
    assert worst <= 0.02


def test_chen_rejects_laminar_and_transitional():
    with pytest.raises(RegimeError):
        chen_friction(4000.0, 0.012, 0.6)
    with pytest.raises(InvalidArgument):
        chen_friction(1e6, -1.0, 0.6)


def test_reynolds_value():
    c = GasConstants(v_m=7.5, rho_m=42.0, eta_m=11.0)
    assert reynolds(0.6, c) == pytest.approx(0.6 * 7.5 * 42.0 / 11e-6)


def test_skeleton_resistances_and_capacities():
    for (pipe, r, r_ref, f, f_ref) in regenerate_pipe_table():
        assert r == pytest.approx(r_ref, rel=1e-3), pipe
        assert f == pytest.approx(f_ref, rel=5e-3), pipe


def test_resistance_scales_inversely_with_length():
    const = reference_constants()
    short, long = (skeleton_pipe(row, const, r_gas=1.0, f_max=1.0) for row in (SKELETON_PIPES[3], SKELETON_PIPES[7]))
    ratio = pipeline_resistance(short, const) / pipeline_resistance(long, const)
    assert ratio == pytest.approx(long.length / short.length, rel=1e-12)


def test_calibration_hits_target():
    const = GasConstants()
    pipe = skeleton_pipe(SKELETON_PIPES[0], const, r_gas=1.0, f_max=1.0)
    fitted = calibrate_compressibility(const, pipe, 6.808e-5)
    assert pipeline_resistance(pipe, fitted) == pytest.approx(6.808e-5, rel=1e-12)


def test_capacity_closed_form():
    assert max_capacity(6.808e-5, BAR_MOP**2, BAR_LB**2) == pytest.approx(math.sqrt(6.808e-5 * (68**2 - 43**2)))
    with pytest.raises(NoFeasibleFlow):
        max_capacity(1e-5, 40.0**2, 43.0**2)


def test_breakpoints_exact_at_nodes():
    t = build_breakpoints(0.435, 6)
    assert t.n_increments == 6
    for f, v in zip(t.flows, t.values):
        assert abs(v - f * abs(f)) <= 1e-12
    assert t.flows[3] == 0.0
    assert t.max_chord_error == pytest.approx((0.87 / 6) ** 2 / 4, rel=1e-12)


def test_chord_error_against_dense_sampling():
    t = build_breakpoints(0.5, 5)  # odd: the middle segment straddles zero
    grid = np.linspace(-0.5, 0.5, 200001)
    sampled = np.max(np.abs(np.interp(grid, t.flows, t.values) - grid * np.abs(grid)))
    assert t.max_chord_error == pytest.approx(sampled, rel=1e-6)


@given(st.floats(0.01, 2.0), st.integers(2, 20))
def test_breakpoints_are_odd_symmetric(f_max, n):
    t = build_breakpoints(f_max, n)
    assert np.array_equal(t.flows, -t.flows[::-1])
    assert t.flows[0] == -f_max and t.flows[-1] == f_max


@given(st.floats(-1.0, 0.99), st.floats(0.001, 1.0))
def test_one_sided_chord_error_is_quarter_width_squared(a, h):
    b = a + h
    if a < 0 < b:
        return
    assert chord_error(a, b) == pytest.approx(h * h / 4, rel=1e-9, abs=1e-15)


def test_bad_breakpoint_requests():
    with pytest.raises(InvalidArgument):
        build_breakpoints(0.4, 1)
    with pytest.raises(InvalidArgument):
        build_breakpoints(0.0, 4)
