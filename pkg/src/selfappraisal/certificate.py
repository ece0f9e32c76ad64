"""Closed-form exponential convergence certificate for doubly stochastic
switching, and its validation against simulated trajectories.

With ``L = l(t_{(n-m)B})`` (smallest appraisal once every individual is
positive):

    alpha  = exp(-tau_upper * B * (n-1) * (1 - 2 L))
    mu     = alpha * gamma * (1 - exp(-tau_lower * L))
    q      = alpha * mu**(n-1)
    lambda = -log(1 - q) / (B * tau_upper * (n-1))
    V(t)  <= (1 - q)**(-(1 + 2B(n-1)) / (B(n-1))) * exp(-lambda t) * V(t0)
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import (
    AssumptionViolated,
    InsufficientHorizon,
    InvalidParameter,
    NotDoublyStochastic,
)
from .integrator import POSITIVITY_THRESHOLD, Trajectory
from .switching import SwitchingSchedule, dwell_bounds, verify_assumption1, verify_assumption2

NEAR_VACUOUS = 1e-300


@dataclass(frozen=True)
class RateCertificate:
    n: int
    m: int
    B: int
    tau_upper: float
    tau_lower: float
    gamma: float
    l0: float
    alpha: float
    mu: float
    contraction: float  # q = alpha * mu**(n-1)
    lam: float
    prefactor: float

    @property
    def near_vacuous(self) -> bool:
        return self.contraction < NEAR_VACUOUS

    @property
    def window_time(self) -> float:
        """``B * tau_upper * (n-1)``, the time over which ``V`` shrinks by ``1 - q``."""
        return self.B * self.tau_upper * (self.n - 1)

    def as_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["near_vacuous"] = self.near_vacuous
        return d


def certificate(n, m, B, tau_lower, tau_upper, gamma, l0) -> RateCertificate:
    if int(n) != n or n < 3:
        raise InvalidParameter("the certificate needs n >= 3")
    if int(m) != m or not 2 <= m <= n:
        raise InvalidParameter(f"m must be an integer in [2, n], got {m!r}")
    if int(B) != B or B < 1:
        raise InvalidParameter("B must be a positive integer")
    if not 0 < tau_lower <= tau_upper < math.inf:
        raise InvalidParameter("need 0 < tau_lower <= tau_upper")
    if not 0 < gamma <= 1:
        raise InvalidParameter("gamma must lie in (0, 1]")
    # l0 is a simplex minimum, so 1/n up to round-off
    if not 0 < l0 <= 1.0 / n + 1e-12:
        raise InvalidParameter(f"l0 must lie in (0, 1/n], got {l0!r}")
    n, m, B = int(n), int(m), int(B)
    l0 = min(float(l0), 1.0 / n)
    alpha, mu, q, lam, prefactor = rate_terms(n, B, tau_lower, tau_upper, gamma, l0)
    return RateCertificate(
        n, m, B, float(tau_upper), float(tau_lower), float(gamma), l0,
        alpha, mu, q, lam, prefactor,
    )


def rate_terms(n, B, tau_lower, tau_upper, gamma, l0):
    """Raw closed form ``(alpha, mu, q, lambda, prefactor)`` without
    precondition checks."""
    log_alpha = -tau_upper * B * (n - 1) * (1.0 - 2.0 * l0)
    alpha = math.exp(log_alpha)
    mu = alpha * gamma * -math.expm1(-tau_lower * l0)
    # q through logs: mu**(n-1) underflows long before log(q) does
    q = math.exp(log_alpha + (n - 1) * math.log(mu))
    log1m_q = math.log1p(-q)
    lam = -log1m_q / (B * tau_upper * (n - 1))
    prefactor = math.exp(-log1m_q * (1 + 2 * B * (n - 1)) / (B * (n - 1)))
    return alpha, mu, q, lam, prefactor


def certificate_from_run(
    schedule: SwitchingSchedule, x0, B: int, trajectory: Trajectory
) -> RateCertificate:
    """Certificate with ``l0`` read off the trajectory at ``t_{(n-m)B}``."""
    try:
        gamma = verify_assumption1(schedule)
    except NotDoublyStochastic as exc:
        raise AssumptionViolated(str(exc)) from exc
    if not verify_assumption2(schedule, B):
        raise AssumptionViolated(f"union graphs over windows of {B} are not all strongly connected")
    x0 = np.asarray(getattr(x0, "x", x0), dtype=float)
    n = schedule.n
    m = int(np.count_nonzero(x0 > POSITIVITY_THRESHOLD))
    if m < 2:
        raise InvalidParameter("initial state is a vertex (m < 2)")
    k = (n - m) * B
    if k >= len(trajectory.switch_indices):
        raise InsufficientHorizon(
            f"trajectory ends before t_{k} = {schedule.switch_time(k)!r}"
        )
    l0 = float(trajectory.state_at_switch(k).min())
    bounds = dwell_bounds(schedule)
    return certificate(n, m, B, bounds.lower, bounds.upper, gamma, l0)


def bound_at(cert: RateCertificate, V0: float, t: float) -> float:
    return cert.prefactor * math.exp(-cert.lam * t) * V0


@dataclass
class EnvelopeReport:
    assumptions_met: bool
    max_violation: Optional[float]  # max over samples of V(t) - bound(t)
    violations: int
    empirical_rate: Optional[float]
    lam: Optional[float]
    near_vacuous: bool = False

    @property
    def conservative(self) -> Optional[bool]:
        if self.lam is None or self.empirical_rate is None:
            return None
        return self.empirical_rate >= self.lam

    def as_dict(self):
        d = dict(self.__dict__)
        d["lambda"] = d.pop("lam")
        d["conservative"] = self.conservative
        return d


def decay_rate(times, V, floor: float = 1e-10) -> Optional[float]:
    """Least-squares decay rate of ``ln V`` on the tail.

    Only the stretch before ``V`` first drops under ``floor`` is used (below
    that, round-off dominates); the tail is its later half. Returns ``inf``
    when ``V`` starts at or under the floor, ``None`` if the tail is too short.
    """
    times = np.asarray(times, dtype=float)
    V = np.asarray(V, dtype=float)
    if V[0] <= floor:
        return math.inf
    below = np.flatnonzero(V <= floor)
    end = int(below[0]) if below.size else len(V)
    start = end // 2
    if end - start < 3:
        return None
    t = times[start:end]
    y = np.log(V[start:end])
    slope = np.polyfit(t, y, 1)[0]
    return float(-slope)


def check_envelope(
    cert: Optional[RateCertificate], trajectory: Trajectory, slack: float = 1e-8
) -> EnvelopeReport:
    try:
        verify_assumption1(trajectory.schedule)
        met = cert is not None
    except NotDoublyStochastic:
        met = False
    rate = decay_rate(trajectory.times, trajectory.V)
    if not met:
        return EnvelopeReport(False, None, 0, rate, None)
    t = trajectory.times - trajectory.schedule.t0
    bound = cert.prefactor * np.exp(-cert.lam * t) * trajectory.V[0]
    excess = trajectory.V - bound
    return EnvelopeReport(
        True,
        float(excess.max()),
        int(np.count_nonzero(excess > slack)),
        rate,
        cert.lam,
        cert.near_vacuous,
    )


@dataclass(frozen=True)
class ContractionCheck:
    k0: int
    V_start: float
    V_end: float
    factor: float

    @property
    def holds(self) -> bool:
        return self.V_end <= self.factor * self.V_start + 1e-12


def window_contraction(trajectory: Trajectory, B: int, k0: int) -> ContractionCheck:
    """Check ``V(t_{k0+(n-1)B}) <= (1 - alpha mu^(n-1)) V(t_{k0})`` with
    ``alpha``, ``mu`` evaluated at ``l(t_{k0})``; needs ``x(t_{k0}) > 0``."""
    schedule = trajectory.schedule
    n = schedule.n
    x = trajectory.state_at_switch(k0)
    if x.min() <= 0:
        raise InvalidParameter(f"x(t_{k0}) is not strictly positive")
    k1 = k0 + (n - 1) * B
    if k1 >= len(trajectory.switch_indices):
        raise InsufficientHorizon(f"trajectory ends before t_{k1}")
    gamma = verify_assumption1(schedule)
    bounds = dwell_bounds(schedule)
    cert = certificate(n, n, B, bounds.lower, bounds.upper, gamma, float(x.min()))
    V0 = float(x.max() - x.min())
    x1 = trajectory.state_at_switch(k1)
    return ContractionCheck(k0, V0, float(x1.max() - x1.min()), 1.0 - cert.contraction)
