import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfappraisal.core_types import new_interaction_matrix, support_graph
from selfappraisal.errors import InvalidParameter, NotDoublyStochastic, OutOfHorizon
from selfappraisal.scenarios import EIG_C1, EIG_C2, random_doubly_stochastic
from selfappraisal.switching import (
    SNAP,
    SwitchingSchedule,
    check_assumptions,
    dwell_bounds,
    smallest_window,
    union_graph,
    verify_assumption1,
    verify_assumption2,
)


@pytest.fixture
def mixed(c1, c2):
    return SwitchingSchedule.cycle([c1, c2], 0.4)


def isolate_first():
    # nobody puts weight on individual 0, so vertex 0 is unreachable
    return new_interaction_matrix(
        [[0, 0.5, 0.5, 0], [0, 0, 0.5, 0.5], [0, 0.5, 0, 0.5], [0, 0.5, 0.5, 0]]
    )


@pytest.mark.parametrize("t, which", [(0.1, 0), (0.5, 1), (0.8, 0), (0.0, 0), (0.4, 1), (1.2, 1), (1.6, 0)])
def test_matrix_at(mixed, t, which):
    assert mixed.matrix_at(t) is mixed.pool[which]


def test_matrix_at_long_horizon(mixed):
    # t_k exactly at a switch returns the new matrix even far out
    for k in (999, 1000, 123457):
        t = mixed.switch_time(k)
        assert mixed.segment_at(t) == k
        assert mixed.matrix_at(t) is mixed.pool[k % 2]


def test_constant_schedule(c1):
    s = SwitchingSchedule.constant(c1, 0.4)
    assert all(s.matrix_at(t) is c1 for t in np.linspace(0, 50, 101))


def test_finite_schedule_horizon(c1, c2):
    s = SwitchingSchedule.cycle([c1, c2], [0.1, 0.2], periodic=False)
    assert s.matrix_at(0.25) is c2
    with pytest.raises(OutOfHorizon):
        s.matrix_at(0.3)
    with pytest.raises(OutOfHorizon):
        s.matrix_at(-0.1)
    with pytest.raises(OutOfHorizon):
        union_graph(s, 1, 2)


def test_bad_schedules(c1):
    with pytest.raises(InvalidParameter):
        SwitchingSchedule.cycle([c1], 0.0)
    with pytest.raises(InvalidParameter):
        SwitchingSchedule([c1], [(0.1, 3)])
    small = new_interaction_matrix([[0, 1], [1, 0]])
    with pytest.raises(InvalidParameter):
        SwitchingSchedule.cycle([c1, small], 0.1)


@given(st.lists(st.floats(0.01, 2.0), min_size=1, max_size=5), st.floats(0, 100))
@settings(max_examples=100, deadline=None)
def test_piecewise_constant(dwells, t):
    rng = np.random.default_rng(len(dwells))
    pool = [random_doubly_stochastic(3, rng) for _ in dwells]
    s = SwitchingSchedule.cycle(pool, dwells)
    k = s.segment_at(t)
    eps = SNAP * max(1.0, t)
    assert s.switch_time(k) - eps <= t < s.switch_time(k + 1) - eps
    assert s.matrix_at(t) is s.matrix_for_segment(k)
    for frac in (0.0, 0.3, 0.999):
        u = s.switch_time(k) + frac * s.dwell(k)
        if u < s.switch_time(k + 1):
            assert s.matrix_at(u) is s.matrix_for_segment(k)


def test_dwell_bounds(mixed, c1):
    b = dwell_bounds(mixed)
    assert (b.lower, b.upper) == (0.4, 0.4)
    s = SwitchingSchedule.cycle([c1] * 3, [0.1, 0.2, 0.3])
    assert (dwell_bounds(s).lower, dwell_bounds(s).upper) == (0.1, 0.3)
    assert dwell_bounds(SwitchingSchedule.constant(c1, 0.7)).lower == 0.7


def test_union_graph(mixed, c1, c2):
    assert union_graph(mixed, 0, 1) == support_graph(c1)
    assert union_graph(mixed, 0, 2).arcs == support_graph(c1).arcs | support_graph(c2).arcs
    s = SwitchingSchedule.constant(c1, 0.4)
    for l in range(3):
        for B in range(1, 4):
            assert union_graph(s, l, B) == support_graph(c1)


def test_union_graph_periodic_shift(mixed):
    for l in range(4):
        assert union_graph(mixed, l, 3) == union_graph(mixed, l + 2, 3)


def test_assumption1(c1, c2, mixed):
    assert verify_assumption1(SwitchingSchedule.constant(c1, 0.4)) == 0.25
    with pytest.raises(NotDoublyStochastic) as info:
        verify_assumption1(mixed)
    assert info.value.matrix_index == 1
    with pytest.raises(NotDoublyStochastic):
        verify_assumption1(SwitchingSchedule.cycle([EIG_C1, EIG_C2], 0.4))
    np.testing.assert_allclose(EIG_C1.weights.sum(axis=0), [0.5, 1.5, 1.5, 0.5])


def test_assumption1_ignores_unused_pool_entries(c1, c2):
    s = SwitchingSchedule([c1, c2], [(0.4, 0)])
    assert verify_assumption1(s) == 0.25


def test_assumption2(c1, c2):
    assert verify_assumption2(SwitchingSchedule.constant(c1, 0.4), 1)
    assert verify_assumption2(SwitchingSchedule.constant(c2, 0.4), 1)
    assert not verify_assumption2(SwitchingSchedule.constant(isolate_first(), 0.4), 1)
    assert not verify_assumption2(SwitchingSchedule.constant(isolate_first(), 0.4), 5)


def test_smallest_window_needs_two():
    a = new_interaction_matrix([[0, 1, 0], [1, 0, 0], [0.5, 0.5, 0]])
    b = new_interaction_matrix([[0, 0, 1], [0, 0, 1], [0.5, 0.5, 0]])
    s = SwitchingSchedule.cycle([a, b], 0.3)
    assert not verify_assumption2(s, 1)
    assert smallest_window(s) == 2


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_assumption2_monotone_in_window(seed, period):
    rng = np.random.default_rng(seed)
    pool = [random_doubly_stochastic(4, rng, max_terms=1) for _ in range(period)]
    s = SwitchingSchedule.cycle(pool, 0.3)
    B = smallest_window(s)
    if B is not None:
        assert all(verify_assumption2(s, b) for b in range(B, B + 4))
        assert not any(verify_assumption2(s, b) for b in range(1, B))
    gamma = verify_assumption1(s)
    assert all(gamma <= C.weights[C.weights > 0].min() for C in pool)


def test_check_assumptions_report(c1, mixed):
    r = check_assumptions(SwitchingSchedule.constant(c1, 0.4), 1)
    assert r.all_hold and r.gamma == 0.25 and r.window == 1
    r = check_assumptions(mixed)
    assert not r.doubly_stochastic and r.offending_index == 1 and r.window == 1
    assert r.as_dict()["assumption1"]["offending_matrix"] == 1
