"""Scripted experiments: the non-convergent mixed schedule, the
common-left-eigenvector schedule, and seeded random doubly stochastic runs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .certificate import (
    EnvelopeReport,
    RateCertificate,
    certificate_from_run,
    check_envelope,
)
from .core_types import AppraisalState, new_interaction_matrix, simplex_state
from .errors import GenerationFailed, InvalidParameter, NotDoublyStochastic
from .integrator import IntegratorConfig, Trajectory, integrate
from .switching import SwitchingSchedule, smallest_window, verify_assumption1

CONVERGENCE_TOL = 1e-6
DEFAULT_X0 = (0.4, 0.3, 0.2, 0.1)
DEFAULT_HORIZON = 200.0

C1 = new_interaction_matrix(
    [[0, 3 / 4, 0, 1 / 4], [1 / 4, 0, 3 / 4, 0], [0, 1 / 4, 0, 3 / 4], [3 / 4, 0, 1 / 4, 0]]
)
C2 = new_interaction_matrix(
    [[0, 1, 0, 0], [1 / 2, 0, 1 / 2, 0], [0, 1 / 3, 0, 2 / 3], [0, 0, 1, 0]]
)
# pair sharing the left eigenvector (1/6, 1/3, 1/3, 1/6) for eigenvalue 1
EIG_C1 = new_interaction_matrix(
    [[0, 1, 0, 0], [0, 0, 1 / 2, 1 / 2], [1 / 2, 1 / 2, 0, 0], [0, 0, 1, 0]]
)
EIG_C2 = new_interaction_matrix(
    [[0, 1, 0, 0], [1 / 2, 0, 1 / 2, 0], [0, 1 / 2, 0, 1 / 2], [0, 0, 1, 0]]
)
COMMON_LEFT_EIGENVECTOR = np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6])
C2_EQUILIBRIUM = np.array([0.0917, 0.211, 0.486, 0.211])


@dataclass(frozen=True)
class ConvergeUniform:
    tol: float = CONVERGENCE_TOL


@dataclass(frozen=True)
class ConvergeTo:
    target: tuple
    tol: float


@dataclass(frozen=True)
class NonConvergent:
    tail_window: float = 20.0
    min_amplitude: float = 10 * CONVERGENCE_TOL


@dataclass(frozen=True)
class ConvergeSomewhere:
    tol: float = CONVERGENCE_TOL
    vertex_margin: float = 0.01


Expectation = Union[ConvergeUniform, ConvergeTo, NonConvergent, ConvergeSomewhere]


@dataclass
class Scenario:
    name: str
    schedule: SwitchingSchedule
    x0: AppraisalState
    B: int
    horizon: float
    expectation: Expectation
    seed: Optional[int] = None

    def __post_init__(self):
        if self.x0.n != self.schedule.n:
            raise InvalidParameter("x0 and schedule disagree on n")
        if self.schedule.periodic and self.horizon < 10 * self.schedule.period:
            raise InvalidParameter("horizon must cover at least 10 periods")


@dataclass
class Verdict:
    expectation: str
    satisfied: bool
    metrics: dict = field(default_factory=dict)


@dataclass
class ScenarioResult:
    scenario: Scenario
    trajectory: Trajectory
    verdict: Verdict
    certificate: Optional[RateCertificate] = None
    envelope: Optional[EnvelopeReport] = None

    def summary(self):
        out = {
            "scenario": self.scenario.name,
            "seed": self.scenario.seed,
            "n": self.scenario.schedule.n,
            "B": self.scenario.B,
            "horizon": self.scenario.horizon,
            "x0": self.scenario.x0.x.tolist(),
            "final_state": self.trajectory.states[-1].tolist(),
            "verdict": {
                "expectation": self.verdict.expectation,
                "satisfied": self.verdict.satisfied,
                **self.verdict.metrics,
            },
            "monitors": self.trajectory.monitors.as_dict(),
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.as_dict()
        if self.envelope is not None:
            out["envelope"] = self.envelope.as_dict()
        return out


def _initial(x0, n):
    return simplex_state(DEFAULT_X0 if x0 is None else x0)


def paper_fig1(x0=None, horizon=DEFAULT_HORIZON) -> Scenario:
    """C1 and C2 alternating every 0.4 time units; C2 breaks double stochasticity."""
    schedule = SwitchingSchedule.cycle([C1, C2], 0.4)
    return Scenario("fig1", schedule, _initial(x0, 4), 1, horizon, NonConvergent())


def paper_fig2(x0=None, horizon=DEFAULT_HORIZON) -> Scenario:
    """Row-stochastic pair with a shared left eigenvector, alternating every 0.4."""
    schedule = SwitchingSchedule.cycle([EIG_C1, EIG_C2], 0.4)
    return Scenario("fig2", schedule, _initial(x0, 4), 1, horizon, ConvergeSomewhere())


def derangements(n):
    return [p for p in itertools.permutations(range(n)) if all(p[i] != i for i in range(n))]


def random_doubly_stochastic(n, rng, max_terms=3):
    """Zero-diagonal doubly stochastic matrix as a convex combination of
    derangement permutation matrices. Weights are kept at least
    ``1/(2k)`` so that ``gamma`` stays bounded away from zero."""
    perms = derangements(n)
    k = int(rng.integers(1, min(max_terms, len(perms)) + 1))
    chosen = rng.choice(len(perms), size=k, replace=False)
    w = 0.5 / k + 0.5 * rng.dirichlet(np.ones(k))
    c = np.zeros((n, n))
    for weight, idx in zip(w, chosen):
        c[np.arange(n), perms[idx]] += weight
    # exact row sums are restored by construction only up to round-off
    return new_interaction_matrix(c)


def doubly_stochastic_scenario(
    n=4,
    period_len=2,
    seed=0,
    dwell_range=(0.2, 0.6),
    horizon=DEFAULT_HORIZON,
    m=None,
    retries=50,
) -> Scenario:
    """Seeded random periodic schedule satisfying the three assumptions.

    ``m`` sets the number of nonzero entries of ``x0`` (default: all ``n``).
    """
    if n < 3 or period_len < 1:
        raise InvalidParameter("need n >= 3 and period_len >= 1")
    lo, hi = dwell_range
    if not 0 < lo <= hi:
        raise InvalidParameter("dwell_range must satisfy 0 < low <= high")
    m = n if m is None else m
    if not 2 <= m <= n:
        raise InvalidParameter("m must lie in [2, n]")
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        pool = [random_doubly_stochastic(n, rng) for _ in range(period_len)]
        dwells = rng.uniform(lo, hi, size=period_len).tolist()
        schedule = SwitchingSchedule.cycle(pool, dwells)
        B = smallest_window(schedule)
        if B is None:
            continue
        verify_assumption1(schedule)
        x = np.zeros(n)
        support = rng.choice(n, size=m, replace=False)
        x[support] = rng.dirichlet(np.ones(m))
        x0 = simplex_state(x)
        return Scenario("doubly-stochastic", schedule, x0, B, horizon, ConvergeUniform(), seed)
    raise GenerationFailed(f"no connected schedule after {retries} attempts")


SCENARIOS = {
    "fig1": paper_fig1,
    "fig2": paper_fig2,
    "doubly-stochastic": doubly_stochastic_scenario,
}


def tail_amplitude(traj: Trajectory, window: float) -> float:
    t_end = traj.times[-1]
    tail = traj.states[traj.times >= t_end - window]
    return float(np.max(np.abs(tail - tail.mean(axis=0))))


def evaluate(expectation: Expectation, traj: Trajectory) -> Verdict:
    x_end = traj.states[-1]
    n = traj.n
    name = type(expectation).__name__
    if isinstance(expectation, ConvergeUniform):
        err = float(np.max(np.abs(x_end - 1.0 / n)))
        return Verdict(name, err <= expectation.tol, {"distance_to_uniform": err})
    if isinstance(expectation, ConvergeTo):
        err = float(np.max(np.abs(x_end - np.asarray(expectation.target))))
        return Verdict(name, err <= expectation.tol, {"distance_to_target": err})
    if isinstance(expectation, NonConvergent):
        amp = tail_amplitude(traj, expectation.tail_window)
        return Verdict(name, amp >= expectation.min_amplitude, {"tail_amplitude": amp})
    if isinstance(expectation, ConvergeSomewhere):
        period = traj.schedule.period
        i = traj.index_at(traj.times[-1] - period)
        drift = float(np.max(np.abs(x_end - traj.states[i])))
        gap = float(np.min(np.max(np.abs(x_end[None, :] - np.eye(n)), axis=1)))
        ok = bool(
            drift <= expectation.tol
            and gap >= expectation.vertex_margin
            and x_end.min() >= expectation.vertex_margin
        )
        return Verdict(
            name,
            ok,
            {
                "period_drift": drift,
                "min_coordinate": float(x_end.min()),
                "vertex_distance": gap,
                "empirical": True,
            },
        )
    raise TypeError(f"unknown expectation {expectation!r}")


def run_scenario(s: Scenario, cfg: Optional[IntegratorConfig] = None) -> ScenarioResult:
    cfg = cfg or IntegratorConfig(horizon=s.horizon)
    traj = integrate(s.schedule, s.x0, cfg)
    verdict = evaluate(s.expectation, traj)
    result = ScenarioResult(s, traj, verdict)
    try:
        verify_assumption1(s.schedule)
    except NotDoublyStochastic:
        result.envelope = check_envelope(None, traj)
        return result
    if s.schedule.n >= 3 and s.x0.nonzero_count() >= 2:
        cert = certificate_from_run(s.schedule, s.x0, s.B, traj)
        result.certificate = cert
        result.envelope = check_envelope(cert, traj)
    return result
