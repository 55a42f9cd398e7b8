import dataclasses

import pytest

from h2blend import cases
from h2blend.analysis import run_scenario
from h2blend.errors import AuditError, ConfigError
from h2blend.formulation import COST_TERMS, build_model, fix_investments, gasnet, investment_names
from h2blend.physics import build_breakpoints
from h2blend.system import ScenarioConfig

from conftest import requires_highs
from oracles import expected_counts


def _row(model, name):
    rows = [r for r in model.rows if r.name == name]
    assert len(rows) == 1, name
    return rows[0]


def _coef(model, row, var_name):
    idx = model.var(var_name).index
    return dict(row.coefs).get(idx, 0.0)


@pytest.mark.parametrize("form", ["stp", "btp", "bpp"])
@pytest.mark.parametrize("case", [cases.skeleton_case, cases.storage_case, cases.tank_case,
                                  cases.policy_case, cases.expansion_toy, cases.opposite_flow_case])
def test_counts_follow_component_inventory(case, form):
    system, ts, cfg = case()
    cfg = cfg.replace(flow_formulation=form)
    model = build_model(system, ts, cfg).model
    assert (model.n_vars, model.n_discrete) == expected_counts(system, ts, cfg)


def test_counts_with_inter_period_storage():
    system, ts, cfg = cases.storage_case(long_term="inter", mow=4)
    model = build_model(system, ts, cfg).model
    assert (model.n_vars, model.n_discrete) == expected_counts(system, ts, cfg)
    assert model.count_by_prefix()["inter"] == 2


def test_variable_names():
    system, ts, cfg = cases.skeleton_case()
    b = build_model(system, ts, cfg.replace(flow_formulation="bpp"))
    assert b.v("fgas", "1_2_c1", "rp1", "k1").name == "fgas__rp01__k01__1_2_c1"
    assert b.v("gamma", "i03__1_2_c1", "rp2", "k4").name == "gamma__rp02__k04__i03__1_2_c1"
    assert b.v("alpha", "1_2_c1", "rp2").name == "alpha__rp02__1_2_c1"
    assert b.v("xpipe", "5_6_c2").name == "xpipe__5_6_c2"
    assert b.v("h2ns", "6.ind", "rp1", "k2").name == "h2ns__rp01__k02__6.ind"


def test_direction_binary_is_per_representative_period():
    system, ts, cfg = cases.opposite_flow_case()
    model = build_model(system, ts, cfg.replace(flow_formulation="btp")).model
    assert model.count_by_prefix(discrete_only=True)["alpha"] == len(system.pipelines) * len(ts.rep_periods)


def test_bpp_delta_ordering_rows():
    system, ts, cfg = cases.corridor_case()
    cfg = cfg.replace(flow_formulation="bpp", n_increments=4)
    model = build_model(system, ts, cfg).model
    per_pipe_step = len(system.pipelines) * len(ts.rep_periods) * len(ts.sub_periods)
    assert len(model.rows_with_prefix("fill_hi")) == 4 * per_pipe_step
    assert len(model.rows_with_prefix("fill_lo")) == 3 * per_pipe_step
    assert len(model.rows_with_prefix("pw_pressure")) == per_pipe_step


def test_breakpoint_tables_must_match_config():
    system, ts, cfg = cases.corridor_case()
    b = build_model(system, ts, cfg.replace(flow_formulation="stp"))
    wrong = {p.id: build_breakpoints(p.f_max, 4) for p in system.pipelines}
    with pytest.raises(ConfigError):
        gasnet.add_bpp(b, wrong)
    short = {p.id: build_breakpoints(p.f_max * 0.5, 6) for p in system.pipelines}
    with pytest.raises(ConfigError):
        gasnet.add_bpp(b, short)


def test_compressor_draws_fuel_at_inlet():
    system, ts, cfg = cases.skeleton_case()
    b = build_model(system, ts, cfg.replace(flow_formulation="stp"))
    cmp = system.compressors[0]
    inlet = _row(b.model, f"bal_ch4__rp01__k01__{cmp.from_node}")
    outlet = _row(b.model, f"bal_ch4__rp01__k01__{cmp.to_node}")
    name = b.v("fcmp_ch4", cmp.id, "rp1", "k1").name
    assert _coef(b.model, inlet, name) == pytest.approx(-(1 + cmp.cons_ch4))
    assert _coef(b.model, outlet, name) == 1.0


def test_fuel_cell_consumes_from_hydrogen_balance():
    system, ts, cfg = cases.skeleton_case()
    b = build_model(system, ts, cfg)
    fc = system.units_of("fuel_cell")[0]
    row = _row(b.model, f"bal_h2__rp01__k01__{fc.h2um}")
    assert _coef(b.model, row, b.v("csh2", fc.id, "rp1", "k1").name) == -1.0


def test_unserved_costs_are_period_weighted():
    system, ts, cfg = cases.tank_case()
    b = build_model(system, ts, cfg)
    obj = b.model.objective_terms["h2ns_ch4ns"]
    var = b.v("h2ns", "H.h2", "rp1", "k1")
    assert obj.terms[var.index] == pytest.approx(2 * 1.5 * cfg.c_h2ns)
    assert set(b.model.objective_terms) == set(COST_TERMS) | {"other"}


def test_policy_right_hand_side():
    system, ts, cfg = cases.policy_case(kappa=0.95)
    b = build_model(system, ts, cfg)
    row = _row(b.model, "policy__system")
    assert row.sense == "<="
    assert row.rhs == pytest.approx(0.05 * 0.1 * ts.n_periods)


def test_first_period_startup_in_full_chronology():
    system, ts, cfg = cases.policy_case()
    b = build_model(system, ts, cfg)
    first = _row(b.model, f"startup__rp01__{b.k_code[ts.sub_periods[0]]}__ccgt")
    y, u = b.v("y", "ccgt", "rp1", ts.sub_periods[0]), b.v("u", "ccgt", "rp1", ts.sub_periods[0])
    assert dict(first.coefs) == {y.index: 1.0, u.index: -1.0}
    assert not b.model.rows_with_prefix("ramp_up__rp01__k01__")


def test_missing_prices_are_reported():
    system, ts, cfg = cases.opposite_flow_case()
    with pytest.raises(ConfigError):
        build_model(system, ts, cfg.replace(c_ch4=None))
    system, ts, cfg = cases.policy_case()
    ccgt = dataclasses.replace(system.unit("ccgt"))
    assert ccgt.emis > 0
    with pytest.raises(ConfigError):
        build_model(system, ts, cfg.replace(c_co2=None))


def test_operate_mode_needs_a_plan():
    system, ts, cfg = cases.expansion_toy()
    with pytest.raises(ConfigError):
        build_model(system, ts, cfg.replace(mode="operate_fixed"))
    b = build_model(system, ts, cfg)
    plan = {n: 0.0 for n in investment_names(b.model)}
    plan.pop("xpipe__P_Q_c1")
    with pytest.raises(AuditError):
        build_model(system, ts, cfg.replace(mode="operate_fixed"), fixed=plan)


def test_fixing_rounds_and_clips():
    system, ts, cfg = cases.expansion_toy()
    model = build_model(system, ts, cfg).model
    plan = {n: 0.0 for n in investment_names(model)}
    plan.update({"xh2__smrQ": 1.4, "xh2__elP": 9.0, "xpipe__P_Q_c1": 0.9999997})
    fix_investments(model, plan)
    assert (model.var("xh2__smrQ").lb, model.var("xh2__smrQ").ub) == (1.0, 1.0)
    assert model.var("xh2__elP").ub == 3.0
    assert model.var("xpipe__P_Q_c1").lb == 1.0


def test_cavern_is_binary_when_single():
    system, ts, cfg = cases.skeleton_case()
    model = build_model(system, ts, cfg).model
    assert model.var("xh2__cavern").kind == "binary"
    assert model.var("x__wind").kind == "continuous"


@requires_highs
def test_tank_levels_cycle_within_each_day():
    system, ts, cfg = cases.tank_case()
    r = run_scenario(system, ts, cfg.replace(milp_gap=0.0))
    assert r.status == "optimal"
    assert r.objective > 0
    b = r.builder
    first, last = ts.sub_periods[0], ts.sub_periods[-1]
    tank = system.unit("tank")
    for rp in ts.rep_periods:
        net = (r.value("csh2", "tank", rp, first) * 1.5 * tank.eta_ch
               - r.value("ph2", "tank", rp, first) * 1.5 / tank.eta_dis)
        assert abs(r.value("intra", "tank", rp, last) + net - r.value("intra", "tank", rp, first)) <= 1e-9
    assert b.has("intra", "tank", "rp2", last)


@requires_highs
def test_more_renewable_share_never_lowers_cost():
    system, ts, cfg = cases.policy_case()
    costs = [run_scenario(system, ts, cfg.replace(kappa=k, milp_gap=0.0)).objective for k in (0.0, 0.5, 0.95)]
    assert costs[0] <= costs[1] + 1e-9 <= costs[2] + 2e-9


@requires_highs
def test_gas_price_scales_supply_term():
    system, ts, cfg = cases.blending_case()
    a = run_scenario(system, ts, cfg.replace(c_ch4=0.1))
    b = run_scenario(system, ts, cfg.replace(c_ch4=0.2))
    assert b.costs.terms["gas_supply"] == pytest.approx(2 * a.costs.terms["gas_supply"], rel=1e-9)


def test_default_config_is_btp():
    assert ScenarioConfig().flow_formulation == "btp"
