from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from h2blend.errors import IncompleteMapping, InconsistentWeights, InvalidArgument
from h2blend.temporal import (
    build_full_chronology,
    build_representative,
    load_temporal,
    window_members,
    write_temporal,
)


def _year(n_rp=5, w=73):
    mapping = []
    p = 0
    for day in range(365):
        for h in range(24):
            p += 1
            mapping.append((p, f"rp{day % n_rp + 1}", f"k{h + 1:02d}"))
    w_rp = {f"rp{r}": w for r in range(1, n_rp + 1)}
    w_k = {f"k{h:02d}": 1 for h in range(1, 25)}
    return mapping, w_rp, w_k


def test_five_days_of_73_cover_one_year():
    ts = build_representative(*_year())
    assert ts.n_periods == 8760
    assert sum(ts.w_rp.values()) == 365
    assert ts.total_weight() == 8760
    assert not ts.is_full_chronology


def test_rejects_300_day_year():
    with pytest.raises(InconsistentWeights):
        build_representative(*_year(w=60))


def test_hour_total_checked_separately():
    mapping, w_rp, w_k = _year()
    w_k = dict(w_k, k01=2)
    with pytest.raises(InconsistentWeights):
        build_representative(mapping, w_rp, w_k)


def test_skipping_targets_accepts_toy_years():
    ts = build_representative([(1, "a", "x"), (2, "a", "y")], {"a": 1}, {"x": "1/2", "y": "1/2"}, targets=None)
    assert ts.weight("a", "x") == 0.5


def test_gap_in_chronology_is_incomplete():
    with pytest.raises(IncompleteMapping):
        build_representative([(1, "a", "x"), (3, "a", "x")], {"a": 1}, {"x": 1}, targets=None)


def test_full_chronology_has_no_wraparound():
    ts = build_full_chronology(4)
    assert ts.is_full_chronology
    assert ts.predecessor("rp1", ts.sub_periods[0]) is None
    assert ts.predecessor("rp1", ts.sub_periods[2]) == ts.sub_periods[1]
    assert ts.mow == 4


def test_representative_predecessor_is_cyclic():
    ts = build_representative(*_year())
    assert ts.predecessor("rp3", "k01") == "k24"


def test_mow_must_divide_horizon():
    with pytest.raises(InvalidArgument):
        build_full_chronology(10, mow=3)
    with pytest.raises(InvalidArgument):
        build_full_chronology(10).with_mow(0)


def test_window_members_counts_multiplicity():
    # 73 days per window: the five representative days cycle 15, 15, 15, 14, 14 times
    ts = build_representative(*_year(), mow=1752)
    members = {(rp, k): m for rp, k, m in window_members(ts, 1752)}
    assert members[("rp1", "k05")] == 15
    assert members[("rp5", "k24")] == 14
    assert sum(members.values()) == 1752
    assert ts.checkpoints() == [1752, 3504, 5256, 7008, 8760]
    with pytest.raises(InvalidArgument):
        window_members(ts, 1751)


@given(st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=6))
def test_window_multiplicities_sum_to_window_length(n_rp, n_k):
    mapping = [(p, f"r{(p - 1) // n_k % n_rp}", f"k{(p - 1) % n_k}") for p in range(1, 3 * n_rp * n_k + 1)]
    ts = build_representative(mapping, {f"r{i}": 1 for i in range(n_rp)}, {f"k{i}": 1 for i in range(n_k)},
                              targets=None, mow=n_k * n_rp)
    for p in ts.checkpoints():
        members = window_members(ts, p)
        assert sum(m for _, _, m in members) == n_k * n_rp
        assert all(m == 1 for _, _, m in members)


def test_round_trip_through_csv(tmp_path):
    ts = build_representative(*_year(), mow=120)
    write_temporal(ts, tmp_path)
    back = load_temporal(tmp_path, mow=120)
    assert back.gamma == ts.gamma
    assert dict(back.w_rp) == {k: Fraction(v) for k, v in ts.w_rp.items()}
