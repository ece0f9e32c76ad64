import numpy as np
import pytest

from selfappraisal.errors import InvalidParameter, NotDoublyStochastic
from selfappraisal.scenarios import (
    COMMON_LEFT_EIGENVECTOR,
    EIG_C1,
    EIG_C2,
    ConvergeUniform,
    Scenario,
    derangements,
    doubly_stochastic_scenario,
    paper_fig1,
    paper_fig2,
    random_doubly_stochastic,
    run_scenario,
)
from selfappraisal.switching import verify_assumption1, verify_assumption2


def test_derangement_count():
    assert [len(derangements(n)) for n in (2, 3, 4, 5)] == [1, 2, 9, 44]


def test_fig1_definition():
    s = paper_fig1()
    with pytest.raises(NotDoublyStochastic):
        verify_assumption1(s.schedule)
    assert verify_assumption2(s.schedule, 1)
    assert s.schedule.matrix_at(0.5) is s.schedule.pool[1]


def test_fig2_left_eigenvector():
    for C in (EIG_C1, EIG_C2):
        assert np.max(np.abs(COMMON_LEFT_EIGENVECTOR @ C.weights - COMMON_LEFT_EIGENVECTOR)) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_generator_contract(seed):
    s = doubly_stochastic_scenario(n=3 + seed % 3, period_len=1 + seed % 3, seed=seed)
    assert verify_assumption1(s.schedule) > 0
    assert verify_assumption2(s.schedule, s.B)
    assert np.all(s.x0.x > 0)
    for C in s.schedule.pool:
        assert np.all(np.diag(C.weights) == 0) and C.doubly_stochastic


def test_generator_deterministic():
    a = doubly_stochastic_scenario(n=5, period_len=3, seed=42)
    b = doubly_stochastic_scenario(n=5, period_len=3, seed=42)
    assert a.B == b.B
    np.testing.assert_array_equal(a.x0.x, b.x0.x)
    for Ca, Cb in zip(a.schedule.pool, b.schedule.pool):
        np.testing.assert_array_equal(Ca.weights, Cb.weights)
    assert a.schedule.segments == b.schedule.segments


def test_generator_sparse_start():
    s = doubly_stochastic_scenario(n=5, seed=3, m=2)
    assert s.x0.nonzero_count() == 2


def test_generator_rejects():
    with pytest.raises(InvalidParameter):
        doubly_stochastic_scenario(n=2)
    with pytest.raises(InvalidParameter):
        doubly_stochastic_scenario(n=4, m=1)


def test_random_matrix_gamma_floor():
    rng = np.random.default_rng(0)
    for _ in range(20):
        C = random_doubly_stochastic(4, rng)
        assert C.gamma >= 0.5 / 3 - 1e-12


def test_scenario_horizon_check():
    s = paper_fig1()
    with pytest.raises(InvalidParameter):
        Scenario("x", s.schedule, s.x0, 1, 1.0, ConvergeUniform())


def test_run_ds_scenario_verdict_and_certificate():
    s = doubly_stochastic_scenario(4, 2, seed=11, dwell_range=(0.2, 0.6))
    r = run_scenario(s)
    assert r.verdict.satisfied
    assert r.certificate is not None and r.envelope.violations == 0
    assert np.all(np.diff(r.trajectory.V) <= 1e-8)
    summary = r.summary()
    assert summary["verdict"]["satisfied"] is True


def test_run_fig1_fig2():
    r1 = run_scenario(paper_fig1())
    assert r1.verdict.satisfied and r1.certificate is None
    assert not r1.envelope.assumptions_met
    r2 = run_scenario(paper_fig2())
    assert r2.verdict.satisfied and r2.verdict.metrics["empirical"]


def test_fig1_non_convergence_robust_to_x0():
    rng = np.random.default_rng(5)
    for _ in range(3):
        r = run_scenario(paper_fig1(x0=rng.dirichlet(np.ones(4))))
        assert r.verdict.satisfied
