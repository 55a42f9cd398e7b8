import dataclasses

import pytest

from h2blend import cases
from h2blend.errors import ConfigError, LinkError, SchemaError
from h2blend.system import (
    GasConstants,
    ScenarioConfig,
    Unit,
    check_system,
    config_to_text,
    export_system,
    load_config,
    load_system,
    validate_attachments,
)


@pytest.fixture()
def skeleton_dir(tmp_path):
    system, _, _ = cases.skeleton_case()
    export_system(system, tmp_path)
    return system, tmp_path


def test_round_trip_is_lossless(skeleton_dir):
    system, d = skeleton_dir
    back = load_system(d)
    assert back.constants == system.constants
    assert back.nodes == system.nodes
    assert back.pipelines == system.pipelines
    assert back.compressors == system.compressors
    assert back.lines == system.lines
    assert back.units == system.units
    assert back.demand.gas == system.demand.gas
    assert back.demand.classes == system.demand.classes
    assert back.availability == system.availability


def test_export_is_byte_stable(skeleton_dir, tmp_path_factory):
    system, d = skeleton_dir
    other = tmp_path_factory.mktemp("again")
    export_system(load_system(d), other)
    for f in sorted(d.iterdir()):
        assert (other / f.name).read_bytes() == f.read_bytes(), f.name


def test_unknown_column_is_schema_error(skeleton_dir):
    _, d = skeleton_dir
    path = d / "gas_nodes.csv"
    lines = path.read_text().splitlines()
    path.write_text("\n".join([lines[0] + ",colour"] + [ln + ",red" for ln in lines[1:]]) + "\n")
    with pytest.raises(SchemaError) as info:
        load_system(d)
    assert info.value.table == "gas_nodes.csv"


def test_dangling_pipeline_end_is_link_error(skeleton_dir):
    _, d = skeleton_dir
    path = d / "pipelines.csv"
    text = path.read_text().replace("\n1,2,", "\n1,99,", 1)
    path.write_text(text)
    with pytest.raises(LinkError):
        load_system(d)


def test_bad_number_reports_row(skeleton_dir):
    _, d = skeleton_dir
    path = d / "gas_nodes.csv"
    lines = path.read_text().splitlines()
    parts = lines[2].split(",")
    parts[1] = "lots"
    lines[2] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError) as info:
        load_system(d)
    assert info.value.row == 3


def test_missing_files_mean_empty_tables(tmp_path):
    system = load_system(tmp_path)
    assert system.nodes == [] and system.units == []
    assert system.constants == GasConstants()


def test_gas_constants_must_be_ordered():
    with pytest.raises(SchemaError):
        GasConstants(h_ch4=3.0, h_h2=10.0)
    with pytest.raises(SchemaError):
        GasConstants(rho_n=0.0)


def test_unit_requirements_enforced():
    system, _, _ = cases.blending_case()
    broken = dataclasses.replace(system, units=system.units + [Unit("el2", "electrolyzer", gi="e", h2um="N", p_max=1.0)])
    with pytest.raises(SchemaError):
        check_system(broken)


def test_attachment_report():
    system, _, _ = cases.blending_case()
    assert validate_attachments(system) == []
    odd = dataclasses.replace(system, units=[Unit("w", "gas_well", gi="e", p_max=1.0)])
    issues = validate_attachments(odd)
    assert ("w", "gas_well is missing its ch4um attachment") in issues
    assert ("w", "gas_well must not have a gi attachment") in issues


def test_config_round_trip(tmp_path):
    cfg = ScenarioConfig(flow_formulation="bpp", c_co2=8e-5, mow=24, continuous_invest=("bess",))
    path = tmp_path / "config.txt"
    path.write_text(config_to_text(cfg))
    assert load_config(path) == cfg


def test_config_rejects_unknown_keys_and_values(tmp_path):
    path = tmp_path / "config.txt"
    path.write_text("flow_formulation = stp\nspeed = fast\n")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        ScenarioConfig(flow_formulation="weymouth")
    with pytest.raises(ConfigError):
        ScenarioConfig(blend_min=0.2, blend_max=0.1)
    with pytest.raises(ConfigError):
        ScenarioConfig(n_increments=1)


def test_big_m_default_and_override():
    system, _, _ = cases.opposite_flow_case()
    assert ScenarioConfig().resolved_big_m(system) == 10.0
    with pytest.raises(ConfigError):
        ScenarioConfig(big_m=0.5).resolved_big_m(system)


def test_pipeline_annuity():
    system, _, _ = cases.skeleton_case()
    cand = [p for p in system.pipelines if not p.existing][0]
    # perpetuity: the annuity factor reduces to the interest rate
    assert cand.annuity_factor == pytest.approx(cand.annuity_rate)
    finite = dataclasses.replace(cand, lifetime=20.0)
    r = cand.annuity_rate
    assert finite.annuity_factor == pytest.approx(r / (1 - (1 + r) ** -20))


def test_empty_tuple_survives_config_round_trip(tmp_path):
    cfg = ScenarioConfig(continuous_invest=())
    path = tmp_path / "config.txt"
    path.write_text(config_to_text(cfg))
    assert load_config(path).continuous_invest == ()
