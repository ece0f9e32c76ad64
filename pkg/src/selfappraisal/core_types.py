"""Validated interaction matrices, appraisal states and extremes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidMatrix,
    NegativeEntry,
    NonzeroDiagonal,
    NotOnSimplex,
    RowSumViolation,
)
from .graph import DirectedGraph

DEFAULT_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Zero-diagonal row-stochastic weight matrix ``C`` with ``c_ij`` the
    weight individual ``i`` puts on outgoing neighbor ``j``.

    Build through :func:`new_interaction_matrix`, which validates the entries
    and fills in ``doubly_stochastic`` and ``gamma``.
    """

    weights: np.ndarray
    doubly_stochastic: bool
    gamma: float
    tol: float = DEFAULT_TOL

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def column_deviation(self) -> float:
        return float(np.max(np.abs(self.weights.sum(axis=0) - 1.0)))

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __repr__(self):
        return (
            f"InteractionMatrix(n={self.n}, doubly_stochastic={self.doubly_stochastic}, "
            f"gamma={self.gamma:.6g})"
        )


def new_interaction_matrix(entries, tol: float = DEFAULT_TOL) -> InteractionMatrix:
    """Validate ``entries`` as a relative interaction matrix.

    Rows are not renormalized: each must already sum to 1 within ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = np.array(entries, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {c.shape}")
    n = c.shape[0]
    if n < 2:
        raise InvalidMatrix("need at least two individuals")
    if not np.all(np.isfinite(c)):
        raise InvalidMatrix("entries must be finite")
    neg = np.argwhere(c < 0)
    if len(neg):
        i, j = (int(v) for v in neg[0])
        raise NegativeEntry(i, j, float(c[i, j]))
    diag = np.diag(c)
    if np.any(diag != 0):
        i = int(np.flatnonzero(diag)[0])
        raise NonzeroDiagonal(i, float(diag[i]))
    dev = c.sum(axis=1) - 1.0
    bad = np.flatnonzero(np.abs(dev) > tol)
    if len(bad):
        i = int(bad[0])
        raise RowSumViolation(i, float(dev[i]))
    ds = bool(np.all(np.abs(c.sum(axis=0) - 1.0) <= tol))
    gamma = float(c[c > 0].min())
    return InteractionMatrix(_frozen(c), ds, gamma, tol)


def support_graph(C: InteractionMatrix) -> DirectedGraph:
    w = np.asarray(C)
    arcs = frozenset((int(i), int(j)) for i, j in np.argwhere(w > 0))
    return DirectedGraph(w.shape[0], arcs)


@dataclass(frozen=True, eq=False)
class AppraisalState:
    t: float
    x: np.ndarray
    residual: float = 0.0

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def nonzero_count(self, threshold: float = 1e-12) -> int:
        return int(np.count_nonzero(self.x > threshold))


def simplex_state(x, t: float = 0.0, tol: float = DEFAULT_TOL) -> AppraisalState:
    """Check ``x`` lies on the probability simplex and return a clamped copy.

    ``residual`` is the worst pre-clamp defect: the sum error or the largest
    excursion of an entry outside ``[0, 1]``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise NotOnSimplex(float("inf"), "state must be a nonempty finite vector")
    residual = max(
        abs(float(np.sum(v)) - 1.0),
        float(max(0.0, -v.min())),
        float(max(0.0, v.max() - 1.0)),
    )
    if residual > tol:
        raise NotOnSimplex(residual)
    return AppraisalState(float(t), _frozen(np.clip(v, 0.0, 1.0)), residual)


def vertex(n: int, i: int, t: float = 0.0) -> AppraisalState:
    e = np.zeros(n)
    e[i] = 1.0
    return simplex_state(e, t)


def barycenter(n: int, t: float = 0.0) -> AppraisalState:
    return simplex_state(np.full(n, 1.0 / n), t)


@dataclass(frozen=True)
class Extremes:
    h: float
    l: float
    v: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "v", self.h - self.l)


def extremes(x) -> Extremes:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty state")
    return Extremes(float(x.max()), float(x.min()))
