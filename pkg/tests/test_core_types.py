import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfappraisal.core_types import (
    barycenter,
    extremes,
    new_interaction_matrix,
    simplex_state,
    support_graph,
    vertex,
)
from selfappraisal.errors import (
    InvalidMatrix,
    NegativeEntry,
    NonzeroDiagonal,
    NotOnSimplex,
    RowSumViolation,
)

from conftest import random_stochastic


def test_c1_doubly_stochastic(c1):
    assert c1.doubly_stochastic
    assert c1.gamma == 0.25
    assert c1.n == 4


def test_c2_not_doubly_stochastic(c2):
    assert not c2.doubly_stochastic
    assert c2.gamma == pytest.approx(1 / 3)


@pytest.mark.parametrize(
    "entries, exc",
    [
        ([[1.0, 0.0], [1.0, 0.0]], NonzeroDiagonal),
        ([[0.0, 1.0], [1.5, -0.5]], NegativeEntry),
        ([[0.0, 0.9], [1.0, 0.0]], RowSumViolation),
        ([[0.0]], InvalidMatrix),
        ([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]], InvalidMatrix),
    ],
)
def test_rejects(entries, exc):
    with pytest.raises(exc):
        new_interaction_matrix(entries)


def test_row_sum_violation_reports_row():
    with pytest.raises(RowSumViolation) as info:
        new_interaction_matrix([[0, 1, 0], [0.5, 0, 0.5], [0.2, 0.2, 0]])
    assert info.value.i == 2
    assert info.value.deviation == pytest.approx(-0.6)


def test_thirds_accepted_within_tolerance():
    C = new_interaction_matrix([[0, 1 / 3, 2 / 3], [2 / 3, 0, 1 / 3], [1 / 3, 2 / 3, 0]])
    assert C.doubly_stochastic


def test_weights_read_only(c1):
    with pytest.raises(ValueError):
        c1.weights[0, 1] = 0.5


def test_support_graph_c2(c2):
    g = support_graph(c2)
    assert g.arcs == {(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)}


def test_support_graph_c1_two_cycles(c1):
    g = support_graph(c1)
    assert len(g.arcs) == 8
    forward = {(0, 1), (1, 2), (2, 3), (3, 0)}
    backward = {(b, a) for a, b in forward}
    assert g.arcs == forward | backward


def test_support_graph_full():
    n = 5
    c = np.full((n, n), 1 / (n - 1))
    np.fill_diagonal(c, 0)
    g = support_graph(new_interaction_matrix(c))
    assert len(g.arcs) == n * (n - 1)
    assert g.is_strongly_connected()


@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_matrix_properties(n, seed):
    rng = np.random.default_rng(seed)
    C = new_interaction_matrix(random_stochastic(rng, n))
    w = C.weights
    assert np.max(np.abs(w.sum(axis=1) - 1)) <= C.tol
    assert w.min() >= 0 and np.trace(w) == 0
    assert C.doubly_stochastic == bool(np.all(np.abs(w.T.sum(axis=1) - 1) <= C.tol))
    assert C.gamma == w[w > 0].min()
    g = support_graph(C)
    assert all(g.out_degree(i) >= 1 for i in range(n))


def test_removing_min_arc_raises_gamma_or_fails():
    C = new_interaction_matrix([[0, 0.2, 0.8], [0.5, 0, 0.5], [0.3, 0.7, 0]])
    w = C.weights.copy()
    w[0, 1] = 0.0
    w[0, 2] = 1.0
    assert new_interaction_matrix(w).gamma > C.gamma
    w = C.weights.copy()
    w[0, 1] = 0.0
    with pytest.raises(RowSumViolation):
        new_interaction_matrix(w)


def test_simplex_state_vertex_and_barycenter():
    assert vertex(4, 0).x.tolist() == [1, 0, 0, 0]
    s = simplex_state([0.25] * 4)
    assert s.residual == 0
    np.testing.assert_array_equal(barycenter(4).x, s.x)


def test_simplex_state_rejects():
    with pytest.raises(NotOnSimplex):
        simplex_state([0.6, 0.6, -0.2, 0], tol=1e-9)
    with pytest.raises(NotOnSimplex):
        simplex_state([0.5, 0.4])


def test_simplex_state_clamps_tiny_negatives():
    s = simplex_state([0.5, 0.5 + 1e-12, -1e-12])
    assert s.x.min() == 0.0
    assert s.residual == pytest.approx(1e-12)


@pytest.mark.parametrize(
    "x, expected",
    [
        ([0.25] * 4, (0.25, 0.25, 0.0)),
        ([1, 0, 0, 0], (1.0, 0.0, 1.0)),
        ([0.0917, 0.211, 0.486, 0.211], (0.486, 0.0917, 0.486 - 0.0917)),
    ],
)
def test_extremes(x, expected):
    e = extremes(x)
    assert (e.h, e.l, e.v) == expected
