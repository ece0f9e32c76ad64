"""Vector field of the self-appraisal model and related pure functions.

For a row-stochastic ``C`` the model reads, coordinatewise,

    dx_i/dt = -(1 - x_i) x_i + sum_j c_ji (1 - x_j) x_j

or in matrix form ``dx/dt = -W x`` with ``W = I - X - C^T (I - X)``.
"""
from __future__ import annotations

import math

import numpy as np

from .core_types import InteractionMatrix
from .errors import (
    ConvergedToVertex,
    DimensionMismatch,
    NoConvergence,
    NoFeasibleRoot,
)


def _weights(C) -> np.ndarray:
    return np.asarray(C, dtype=float)


def _check(C, x):
    c = _weights(C)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != c.shape[0]:
        raise DimensionMismatch(f"state of shape {x.shape} for a {c.shape[0]}x{c.shape[0]} matrix")
    return c, x


def rhs(C: InteractionMatrix, x) -> np.ndarray:
    c, x = _check(C, x)
    y = (1.0 - x) * x
    return c.T @ y - y


def w_matrix(C: InteractionMatrix, x) -> np.ndarray:
    c, x = _check(C, x)
    n = x.shape[0]
    one_minus = np.diag(1.0 - x)
    return np.eye(n) - np.diag(x) - c.T @ one_minus


def jacobian(C: InteractionMatrix, x) -> np.ndarray:
    """Derivative of :func:`rhs` with respect to ``x``."""
    c, x = _check(C, x)
    n = x.shape[0]
    return (c.T - np.eye(n)) * (1.0 - 2.0 * x)[None, :]


def opinion_rhs(C: InteractionMatrix, x, z) -> np.ndarray:
    """Consensus dynamics of opinions ``z`` slowed by self-appraisal:
    ``dz_i = (1 - x_i) (sum_j c_ij z_j - z_i)``."""
    c, x = _check(C, x)
    z = np.asarray(z, dtype=float)
    if z.shape != x.shape:
        raise DimensionMismatch("opinions and appraisals differ in length")
    return (1.0 - x) * (c @ z - z)


def equilibrium_fixed(
    C: InteractionMatrix,
    x0=None,
    tol: float = 1e-12,
    max_iter: int = 100,
    fallback_horizon: float = 200.0,
) -> np.ndarray:
    """Interior equilibrium of the model under a fixed matrix.

    Damped Newton in the chart ``x_n = 1 - sum_{i<n} x_i`` starting from
    ``x0`` (barycenter by default). If Newton stalls or leaves the simplex,
    the state is first relaxed by long-horizon integration and Newton is
    retried from there.
    """
    c = _weights(C)
    n = c.shape[0]
    x0 = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise DimensionMismatch("x0 has the wrong length")
    if np.any(x0 <= 0) or abs(x0.sum() - 1.0) > 1e-9:
        raise ValueError("x0 must be an interior point of the simplex")

    x = _newton(c, x0, tol, max_iter)
    if x is None:
        from .integrator import IntegratorConfig, integrate
        from .switching import SwitchingSchedule

        sched = SwitchingSchedule.constant(C, fallback_horizon)
        traj = integrate(sched, x0, IntegratorConfig(horizon=fallback_horizon))
        x = _newton(c, traj.states[-1], tol, max_iter)
        if x is None:
            raise NoConvergence(f"no fixed point within {max_iter} Newton steps")
    if x.max() > 1.0 - 1e-6:
        raise ConvergedToVertex(f"solve collapsed onto vertex e_{int(np.argmax(x))}")
    return x


def _newton(c, x0, tol, max_iter):
    n = c.shape[0]
    x = np.array(x0, dtype=float)
    f = rhs(c, x)
    res = np.max(np.abs(f))
    for _ in range(max_iter):
        if res <= tol:
            return x
        J = jacobian(c, x)
        # chart coordinates: dx = (dy, -sum dy)
        Jy = J[: n - 1, : n - 1] - J[: n - 1, n - 1 : n]
        try:
            dy = np.linalg.solve(Jy, -f[: n - 1])
        except np.linalg.LinAlgError:
            return None
        dx = np.append(dy, -dy.sum())
        step = 1.0
        while step > 1e-10:
            cand = x + step * dx
            cand[-1] = 1.0 - cand[:-1].sum()
            if np.all(cand >= 0):
                fc = rhs(c, cand)
                rc = np.max(np.abs(fc))
                if rc < res:
                    x, f, res = cand, fc, rc
                    break
            step *= 0.5
        else:
            return None
    return x if res <= tol else None


def lemma4_v(beta, x, atol: float = 1e-12) -> float:
    """Scalar ``v`` with ``v - v**2 = sum_k beta_k (x_k - x_k**2)``.

    ``v`` lies between the smallest and largest ``x_k`` on the support of
    ``beta`` and satisfies ``v <= beta @ x``. The smaller quadratic root is
    preferred; the larger one is used only when the smaller misses the range.

    Near ``v = 1/2`` the roots are ill-conditioned while ``v - v**2`` is
    flat, so each root is projected onto the feasible interval and accepted
    when the identity holds to ``atol``.
    """
    beta = np.asarray(beta, dtype=float)
    x = np.asarray(x, dtype=float)
    if beta.shape != x.shape:
        raise DimensionMismatch("beta and x differ in length")
    support = beta > 0
    if not support.any():
        raise NoFeasibleRoot("beta has empty support")
    lo = float(x[support].min())
    hi = min(float(x[support].max()), float(beta @ x))
    c = float(beta @ (x - x * x))
    disc = 1.0 - 4.0 * c
    if disc < 0:
        if disc < -1e-12:
            raise NoFeasibleRoot(f"discriminant {disc:.3e} is negative")
        disc = 0.0
    s = math.sqrt(disc)
    small = 2.0 * c / (1.0 + s)  # (1 - s)/2 without cancellation
    large = (1.0 + s) / 2.0
    for root in (small, large):
        v = min(max(root, lo), hi)
        if abs(v - v * v - c) <= atol:
            return v
    raise NoFeasibleRoot(f"neither root {small!r}, {large!r} fits [{lo!r}, {hi!r}]")
