import dataclasses
import math

import pytest

from h2blend import cases
from h2blend.analysis import (
    audit_fixed_investments,
    detect_violations,
    pipe_flows,
    pressure_profile,
    read_solution,
    run_scenario,
)
from h2blend.errors import AuditError, ConfigError

from conftest import requires_highs

pytestmark = requires_highs


def stranded_cavern_case():
    """A cavern that cannot be charged but must stay above a floor it starts below."""
    system, ts, cfg = cases.storage_case()
    cav = dataclasses.replace(system.unit("cav"), cs_max=0.0, r_min=0.6, in_res=0.5)
    units = [cav if u.id == "cav" else u for u in system.units]
    return dataclasses.replace(system, units=units), ts, cfg


def test_run_writes_consistent_outputs(tmp_path):
    system, ts, cfg = cases.expansion_toy()
    r = run_scenario(system, ts, cfg, out_dir=tmp_path)
    assert r.status == "optimal"
    assert r.costs.total == pytest.approx(r.objective, rel=1e-9)
    assert r.max_bound_violation <= 1e-6 and r.max_row_residual <= 1e-6
    assert read_solution(tmp_path / "solution.csv") == r.values
    rows = (tmp_path / "costs.csv").read_text().splitlines()
    assert rows[0] == "term,value" and rows[-1].startswith("total,")
    assert len(rows) == 2 + 18


def test_repeat_runs_are_byte_identical(tmp_path):
    system, ts, cfg = cases.opposite_flow_case()
    cfg = cfg.replace(flow_formulation="btp")
    run_scenario(system, ts, cfg, out_dir=tmp_path / "a")
    run_scenario(system, ts, cfg, out_dir=tmp_path / "b")
    for name in ("model.mps", "solution.csv", "costs.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_infeasible_run_leaves_a_hint(tmp_path):
    system, ts, cfg = stranded_cavern_case()
    r = run_scenario(system, ts, cfg, out_dir=tmp_path)
    assert r.status == "infeasible"
    assert r.costs is None
    hint = (tmp_path / "infeasible_rows.txt").read_text()
    assert "intra_min\t8" in hint
    with pytest.raises(ConfigError):
        detect_violations(r)


def test_transport_model_mixes_directions():
    system, ts, cfg = cases.opposite_flow_case()
    r = run_scenario(system, ts, cfg.replace(flow_formulation="stp"))
    kinds = {v.kind for v in detect_violations(r)}
    assert kinds & {"sign", "blend"}


def test_balance_tampering_is_detected():
    system, ts, cfg = cases.blending_case()
    r = run_scenario(system, ts, cfg)
    assert detect_violations(r, ("balance",)) == []
    name = r.builder.v("pch4", "well", "rp1", "k1").name
    r.solution.values[name] += 0.01
    found = detect_violations(r, ("balance",))
    assert [(v.kind, v.entity) for v in found] == [("balance", "N")]
    assert found[0].amount == pytest.approx(0.01)


def test_unknown_violation_kind():
    system, ts, cfg = cases.blending_case()
    r = run_scenario(system, ts, cfg)
    with pytest.raises(ConfigError):
        detect_violations(r, ("leak",))


def test_implied_pressures_follow_weymouth_chain(tmp_path):
    system, ts, cfg = cases.corridor_case()
    r = run_scenario(system, ts, cfg)
    flows = pipe_flows(r)
    rows = pressure_profile(r, ["A", "B", "C"], tmp_path / "p.csv")
    by_node = {(n, k): bar for n, _, k, bar, *_ in rows}
    assert {src for *_, src in rows} == {"implied"}
    for k in ts.sub_periods:
        f_ab, f_bc = flows[("A_B_c1", "rp1", k)][0], flows[("B_C_c1", "rp1", k)][0]
        r_gas = system.pipelines[0].r_gas
        p_c = 43.0
        p_b = math.sqrt(p_c**2 + f_bc**2 / r_gas)
        p_a = math.sqrt(p_b**2 + f_ab**2 / r_gas)
        assert by_node[("C", k)] == pytest.approx(p_c)
        assert by_node[("B", k)] == pytest.approx(p_b, rel=1e-6)
        assert by_node[("A", k)] == pytest.approx(p_a, rel=1e-6)
    assert (tmp_path / "p.csv").read_text().startswith("node,rp,k,pressure_bar,lb_bar,mop_bar,source\n")
    mop = detect_violations(r, ("mop",))
    assert {v.entity for v in mop} == {"A"}


def test_profile_rejects_unknown_node():
    system, ts, cfg = cases.corridor_case()
    r = run_scenario(system, ts, cfg.replace(flow_formulation="stp"))
    with pytest.raises(KeyError):
        pressure_profile(r, ["A", "Z"])


def test_audit_of_failed_plan_is_refused():
    system, ts, cfg = stranded_cavern_case()
    plan = run_scenario(system, ts, cfg)
    with pytest.raises(AuditError):
        audit_fixed_investments(plan, system, ts, cfg)


def test_self_audit_costs_nothing(tmp_path):
    system, ts, cfg = cases.expansion_toy()
    plan = run_scenario(system, ts, cfg)
    regret = audit_fixed_investments(plan, system, ts, cfg, out_dir=tmp_path)
    assert regret.cost_delta == pytest.approx(0.0, abs=1e-7)
    assert regret.mop_violations == []
    text = (tmp_path / "regret.csv").read_text()
    assert text.startswith("quantity,value\nplan_formulation,stp\naudit_formulation,stp\n")
