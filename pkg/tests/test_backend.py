import itertools
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from h2blend.backend import BINARY, INTEGER, ModelInstance, emit, quicksum, solve, to_lp, to_mps
from h2blend.backend.solvers import parse_cbc_solution, parse_highs_solution, solve_file
from h2blend.errors import EmissionError, ProtocolError, SolverEnvironmentError

from conftest import DRIVERS, requires_highs

WEIGHTS = [12, 7, 11, 8, 9, 6, 5, 14]
VALUES = [24, 13, 23, 15, 16, 11, 9, 27]
CAPACITY = 40


def knapsack() -> ModelInstance:
    m = ModelInstance("knap")
    xs = [m.add_var(f"x{i}", BINARY, 0, 1) for i in range(len(WEIGHTS))]
    extra = m.add_var("spare", INTEGER, 0, 3)  # filler pieces of weight 3, value 4
    m.add_constr("cap", quicksum(x * w for x, w in zip(xs, WEIGHTS)) + extra * 3 <= CAPACITY)
    m.add_objective("value", quicksum(x * -v for x, v in zip(xs, VALUES)) - extra * 4 + 100)
    return m


def knapsack_brute_force() -> float:
    best = math.inf
    for pick in itertools.product((0, 1), repeat=len(WEIGHTS)):
        for spare in range(4):
            if sum(p * w for p, w in zip(pick, WEIGHTS)) + 3 * spare <= CAPACITY:
                best = min(best, 100 - sum(p * v for p, v in zip(pick, VALUES)) - 4 * spare)
    return best


def test_brute_force_oracle_value():
    # frozen by hand: items 0, 2, 7 (weight 37, value 74) plus one spare piece fill the sack
    assert knapsack_brute_force() == 100 - 78


@pytest.mark.parametrize("driver", DRIVERS)
@pytest.mark.parametrize("fmt", ["lp", "mps"])
def test_knapsack_matches_enumeration(driver, fmt, tmp_path):
    sol = solve(knapsack(), gap=0.0, driver=driver, workdir=tmp_path, fmt=fmt)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(knapsack_brute_force(), abs=1e-6)
    assert all(abs(sol[f"x{i}"] - round(sol[f"x{i}"])) < 1e-6 for i in range(len(WEIGHTS)))


def small_lp() -> ModelInstance:
    m = ModelInstance("lp")
    x = m.add_var("x", lb=0, ub=4)
    y = m.add_var("y", lb=-1, ub=math.inf)
    m.add_constr("c1", x + y * 2 >= 3)
    m.add_constr("c2", (x * 3 - y).equals(2))
    m.add_objective("cost", x * 2 + y * 5)
    return m


def test_matrices_agree_with_linprog():
    c, a_ub, b_ub, a_eq, b_eq, bounds, integrality, const = small_lp().as_matrices()
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    # closed form: both rows bind, x = 1, y = 1
    assert res.x == pytest.approx([1.0, 1.0])
    assert res.fun + const == pytest.approx(7.0)
    assert list(integrality) == [0, 0]


@pytest.mark.parametrize("driver", DRIVERS)
def test_lp_solution_and_constant(driver, tmp_path):
    m = small_lp()
    m.add_objective("fixed", 10.0)
    sol = solve(m, driver=driver, workdir=tmp_path)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(17.0, abs=1e-6)
    assert m.term_values(sol.values)["fixed"] == 10.0


@pytest.mark.parametrize("driver", DRIVERS)
def test_infeasible_status(driver, tmp_path):
    m = ModelInstance("bad")
    x = m.add_var("x", lb=0, ub=1)
    m.add_constr("big", x >= 2)
    m.add_objective("cost", x * 1)
    sol = solve(m, driver=driver, workdir=tmp_path)
    assert sol.status == "infeasible"
    assert not sol.ok and sol.values == {}


@pytest.mark.parametrize("driver", DRIVERS)
def test_unbounded_status(driver, tmp_path):
    m = ModelInstance("free")
    x = m.add_var("x", lb=0, ub=math.inf)
    y = m.add_var("y", lb=0, ub=math.inf)
    m.add_constr("link", x - y <= 1)
    m.add_objective("cost", x * -1)
    sol = solve(m, driver=driver, workdir=tmp_path)
    assert sol.status in ("unbounded", "infeasible")
    assert not sol.ok


def test_emission_is_byte_identical(tmp_path):
    for fmt, name in (("lp", "a.lp"), ("mps", "a.mps")):
        first = emit(knapsack(), tmp_path / name, fmt).read_bytes()
        second = emit(knapsack(), tmp_path / ("b" + name), fmt).read_bytes()
        assert first == second


def test_lp_text_layout():
    assert to_lp(small_lp()).splitlines() == [
        "\\ lp", "Minimize", " obj: 2 x + 5 y", "Subject To", " c1: x + 2 y >= 3", " c2: 3 x - y = 2",
        "Bounds", " 0 <= x <= 4", " y >= -1", "End",
    ]


def test_long_rows_are_wrapped():
    m = ModelInstance("wide")
    xs = [m.add_var(f"variable_with_long_name_{i:03d}", ub=1) for i in range(100)]
    m.add_constr("sum", quicksum(xs) <= 5)
    m.add_objective("c", quicksum(xs))
    assert max(len(line) for line in to_lp(m).splitlines()) <= 200


def test_mps_integer_markers_and_bounds():
    text = to_mps(knapsack())
    assert "MARKER" in text and "INTORG" in text and "INTEND" in text
    assert " UP BND spare 3\n" in text
    assert text.startswith("NAME          knap FREE\n")


def test_fixed_mps_rejects_long_names():
    with pytest.raises(EmissionError):
        to_mps(_long_named(), fixed=True)


def _long_named() -> ModelInstance:
    m = ModelInstance("n")
    v = m.add_var("much_too_long", ub=1)
    m.add_constr("r", v <= 1)
    m.add_objective("c", v * 1)
    return m


def test_fixed_mps_short_names_ok():
    text = to_mps(small_lp(), fixed=True)
    assert "ROWS" in text and "RHS" in text


def test_illegal_and_reserved_names():
    m = ModelInstance("n")
    v = m.add_var("obj", ub=1)
    m.add_objective("c", v * 1)
    with pytest.raises(EmissionError):
        to_lp(m)
    m2 = ModelInstance("n")
    with pytest.raises(EmissionError):
        m2.add_var("dup")
        m2.add_var("dup")


def test_parse_highs_solution_text():
    text = "\n".join([
        "Model status", "Optimal", "", "# Primal solution values", "Feasible", "Objective 12.5",
        "# Columns 2", "x 1.5", "y -2", "# Rows 1", "c1 3",
    ])
    status, obj, values = parse_highs_solution(text)
    assert (status, obj, values) == ("Optimal", 12.5, {"x": 1.5, "y": -2.0})
    with pytest.raises(ProtocolError):
        parse_highs_solution("garbage")


def test_parse_cbc_takes_column_block():
    text = "\n".join([
        "Optimal - objective value 7.00000000",
        "      0 c1                      3                       0",
        "      1 c2                      2                       0",
        "      0 x                       1                       0",
        "      1 y                       1                       0",
    ])
    status, obj, values = parse_cbc_solution(text)
    assert status.startswith("Optimal") and obj == 7.0
    assert values == {"x": 1.0, "y": 1.0}


def test_unknown_driver_and_missing_binary(tmp_path, monkeypatch):
    path = emit(small_lp(), tmp_path / "m.lp")
    with pytest.raises(SolverEnvironmentError):
        solve_file(path, driver="gurobi")
    monkeypatch.setenv("H2BLEND_HIGHS", str(tmp_path / "no_such_highs"))
    with pytest.raises(SolverEnvironmentError):
        solve_file(path, driver="highs", workdir=tmp_path)


@requires_highs
def test_time_limit_with_incumbent_is_gap_reached(tmp_path):
    # a knapsack with many items and a tiny limit still returns an incumbent
    rng = np.random.default_rng(7)
    m = ModelInstance("hard")
    w = rng.integers(20, 60, size=60)
    v = w + rng.integers(-5, 5, size=60)
    xs = [m.add_var(f"x{i}", BINARY, 0, 1) for i in range(60)]
    m.add_constr("cap", quicksum(x * float(wi) for x, wi in zip(xs, w)) <= float(w.sum() // 2) + 0.5)
    m.add_objective("v", quicksum(x * -float(vi) for x, vi in zip(xs, v)))
    sol = solve(m, gap=0.0, time_limit=0.05, workdir=tmp_path)
    assert sol.status in ("optimal", "gap_reached")
    assert sol.ok and len(sol.values) == 60
