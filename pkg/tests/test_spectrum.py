import pytest
from hypothesis import given, strategies as st

from odffr.errors import BandExhausted, ConfigError, ConsistencyError
from odffr.spectrum import (
    ALL_BANDS,
    Band,
    BandAllocation,
    CELLS,
    ChannelPool,
    check_conservation,
    default_plan,
    free_eup_count,
    release_channel,
    reserve_channel,
    segment_channel_counts,
)


def test_six_distinct_bands():
    assert len(set(Band)) == 6
    assert str(Band.F3) == "F3"


def test_default_plan_reference_cell_eup():
    plan = default_plan(120)
    alloc = plan.allocation(7)
    assert alloc.eup_bands == {Band.F1, Band.F2}
    assert alloc.cup_bands == {Band.F3, Band.F4, Band.F5, Band.F6}
    assert plan.pool(7).total == [20] * 6


def test_default_plan_reuse_groups():
    plan = default_plan(120)
    assert plan.allocation(3).cup_bands == {Band.F1, Band.F2, Band.F3, Band.F4}
    for c in (1, 3, 5):
        assert plan.allocation(c).eup_bands == {Band.F5, Band.F6}
    for c in (2, 4, 6):
        assert plan.allocation(c).eup_bands == {Band.F3, Band.F4}
        assert plan.allocation(c).cup_bands == {Band.F1, Band.F2, Band.F5, Band.F6}
    allocs = {plan.allocation(c) for c in CELLS}
    assert len(allocs) == 3


def test_default_plan_minimum_and_rejection():
    assert default_plan(6).pool(1).total == [1] * 6
    with pytest.raises(ConfigError):
        default_plan(121)
    with pytest.raises(ConfigError):
        default_plan(0)


def test_plan_disjoint_and_exhaustive():
    plan = default_plan(120)
    for c in CELLS:
        a = plan.allocation(c)
        assert not (a.cup_bands & a.eup_bands)
        assert a.cup_bands | a.eup_bands == ALL_BANDS
        assert sum(plan.pool(c).total) == 120


@pytest.mark.parametrize("cup,eup", [
    ({1, 2, 3}, {3, 4, 5, 6}),
    ({1, 2, 3}, {4, 5}),
    ({1, 2}, {3, 4, 5, 6}),
])
def test_bad_allocation_rejected(cup, eup):
    with pytest.raises(ConfigError):
        BandAllocation(frozenset(cup), frozenset(eup))


def test_admission_order_cup_first():
    plan = default_plan(120)
    assert plan.allocation(7).admission_order == (Band.F3, Band.F4, Band.F5, Band.F6, Band.F1, Band.F2)


def test_free_eup_count():
    plan = default_plan(120)
    assert all(free_eup_count(plan, c) == 40 for c in CELLS)
    pool = plan.pool(3)
    pool.occupied[4] = 15
    assert free_eup_count(plan, 3) == 25
    pool.lent[4], pool.occupied[4], pool.lent[5] = 20, 0, 20
    assert free_eup_count(plan, 3) == 0
    with pytest.raises(ConfigError):
        free_eup_count(plan, 8)


def test_reserve_channel():
    pool = ChannelPool([20] * 6)
    reserve_channel(pool, Band.F1)
    assert pool.occupied[0] == 1
    full = ChannelPool([20] * 6, occupied=[20, 0, 0, 0, 0, 0])
    with pytest.raises(BandExhausted) as info:
        reserve_channel(full, Band.F1)
    assert info.value.band == Band.F1
    half = ChannelPool([20] * 6, occupied=[10, 0, 0, 0, 0, 0], lent=[10, 0, 0, 0, 0, 0])
    with pytest.raises(BandExhausted):
        reserve_channel(half, Band.F1)


def test_release_channel():
    pool = ChannelPool([20] * 6, occupied=[1, 0, 0, 0, 0, 0])
    release_channel(pool, Band.F1)
    assert pool.occupied[0] == 0
    with pytest.raises(ConsistencyError):
        release_channel(pool, Band.F1)


def test_segment_counts():
    assert segment_channel_counts(120) == [20] * 6
    assert segment_channel_counts(121) == [21, 20, 20, 20, 20, 20]
    assert segment_channel_counts(6) == [1] * 6
    with pytest.raises(ConfigError):
        segment_channel_counts(5)


def test_pool_rejects_overcommit():
    with pytest.raises(ConsistencyError):
        ChannelPool([20] * 6, occupied=[15, 0, 0, 0, 0, 0], lent=[6, 0, 0, 0, 0, 0])


def test_check_conservation_flags_corruption():
    plan = default_plan(120)
    check_conservation(plan)
    plan.pool(4).occupied[2] = 21
    with pytest.raises(ConsistencyError):
        check_conservation(plan)


@given(st.integers(min_value=6, max_value=600))
def test_segment_counts_sum(total):
    counts = segment_channel_counts(total)
    assert sum(counts) == total
    assert max(counts) - min(counts) <= 1
    assert counts == sorted(counts, reverse=True)


@given(st.lists(st.tuples(st.sampled_from(list(Band)), st.booleans()), max_size=200))
def test_reserve_release_round_trip(ops):
    pool = ChannelPool([5] * 6)
    start = (list(pool.occupied), list(pool.lent))
    done = []
    for band, reserve in ops:
        if reserve:
            try:
                reserve_channel(pool, band)
                done.append(band)
            except BandExhausted:
                assert pool.free(band) == 0
        elif pool.occupied[int(band) - 1] > 0:
            release_channel(pool, band)
            done.remove(band)
        for b in Band:
            assert pool.occupied[int(b) - 1] + pool.lent[int(b) - 1] + pool.free(b) == 5
    for band in done:
        release_channel(pool, band)
    assert (pool.occupied, pool.lent) == start
