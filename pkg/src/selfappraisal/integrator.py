"""Switch-aligned fixed-step RK4 integration with invariant monitors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core_types import AppraisalState, Extremes, extremes, simplex_state
from .errors import InvalidParameter, OutOfHorizon, SimplexBlowup
from .switching import SwitchingSchedule, dwell_bounds

POSITIVITY_THRESHOLD = 1e-12

__all__ = [
    "IntegratorConfig",
    "MonitorReport",
    "Trajectory",
    "integrate",
    "extremes",
    "first_positivity_time",
]


@dataclass(frozen=True)
class IntegratorConfig:
    horizon: float
    max_step: float = 1e-3
    sample_stride: Optional[int] = None  # None: about 10 samples per dwell
    state_tol: float = 1e-8

    def __post_init__(self):
        if not self.horizon > 0:
            raise InvalidParameter("horizon must be positive")
        if not self.max_step > 0:
            raise InvalidParameter("max_step must be positive")
        if self.sample_stride is not None and self.sample_stride < 1:
            raise InvalidParameter("sample_stride must be >= 1")


@dataclass(frozen=True)
class MonitorReport:
    max_conservation_residual: float
    max_simplex_violation: float
    h_increase_max: float
    l_decrease_max: float
    positivity_time: Optional[float]

    def extremes_monotone(self, slack: float) -> bool:
        return self.h_increase_max <= slack and self.l_decrease_max <= slack

    def as_dict(self):
        return dict(self.__dict__)


class Trajectory:
    """Sampled solution. ``switch_indices[k]`` is the sample row at ``t_k``."""

    def __init__(self, schedule, times, states, switch_indices, monitors, config):
        self.schedule = schedule
        self.times = times
        self.states = states
        self.switch_indices = switch_indices
        self.monitors = monitors
        self.config = config
        self.h = states.max(axis=1)
        self.l = states.min(axis=1)
        self.V = self.h - self.l

    def __len__(self):
        return len(self.times)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def final(self) -> AppraisalState:
        return AppraisalState(float(self.times[-1]), self.states[-1])

    @property
    def samples(self):
        for t, x in zip(self.times, self.states):
            yield float(t), x, extremes(x)

    def state_at_switch(self, k: int) -> np.ndarray:
        if k >= len(self.switch_indices):
            raise IndexError(f"switch {k} not reached by this trajectory")
        return self.states[self.switch_indices[k]]

    def index_at(self, t: float) -> int:
        """Row of the last sample at or before ``t``."""
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        if i < 0:
            raise IndexError(f"t={t!r} precedes the trajectory")
        return i


def _steps(length, max_step):
    # tolerate length/max_step landing a hair above an integer
    k = length / max_step
    return max(1, math.ceil(k - 1e-9 * max(1.0, k)))


def integrate(schedule: SwitchingSchedule, x0, cfg: IntegratorConfig) -> Trajectory:
    """Integrate from ``x0`` at ``schedule.t0`` to ``cfg.horizon``.

    Each dwell interval is split into equal RK4 steps no longer than
    ``cfg.max_step`` so that no step straddles a switch. ``x0`` may be an
    :class:`AppraisalState` or a plain vector.
    """
    if not isinstance(x0, AppraisalState):
        x0 = simplex_state(x0, schedule.t0)
    if x0.n != schedule.n:
        raise InvalidParameter(f"x0 has {x0.n} entries, schedule has n={schedule.n}")
    if cfg.max_step > dwell_bounds(schedule).lower:
        raise InvalidParameter("max_step exceeds the shortest dwell time")
    if cfg.horizon > schedule.end_time:
        raise OutOfHorizon(f"horizon {cfg.horizon!r} past schedule end {schedule.end_time!r}")

    stride = cfg.sample_stride
    if stride is None:
        per_dwell = _steps(dwell_bounds(schedule).lower, cfg.max_step)
        stride = max(1, per_dwell // 10)

    x = np.array(x0.x, dtype=float)
    times = [np.array([schedule.t0])]
    states = [x[None, :]]
    switch_indices = [0]
    count = 1
    cons_max = viol_max = 0.0
    for k, start, end, C in schedule.iter_segments(cfg.horizon):
        nsteps = _steps(end - start, cfg.max_step)
        dt = (end - start) / nsteps
        samples, cons, viol, fail = _kernels.rk4_segment(
            C.weights, x, dt, nsteps, stride, cfg.state_tol
        )
        cons_max = max(cons_max, cons)
        viol_max = max(viol_max, viol)
        if fail >= 0:
            raise SimplexBlowup(start + fail * dt, viol)
        steps = np.arange(1, nsteps + 1)
        steps = steps[(steps % stride == 0) | (steps == nsteps)]
        t = start + steps * dt
        t[-1] = end
        times.append(t)
        states.append(samples)
        count += len(t)
        if end == schedule.switch_time(k + 1):
            switch_indices.append(count - 1)
        x = samples[-1]

    times = np.concatenate(times)
    states = np.concatenate(states)
    h = states.max(axis=1)
    l = states.min(axis=1)
    dh = np.diff(h)
    dl = np.diff(l)
    monitors = MonitorReport(
        max_conservation_residual=max(cons_max, abs(float(states[0].sum()) - 1.0)),
        max_simplex_violation=viol_max,
        h_increase_max=float(max(0.0, dh.max())) if dh.size else 0.0,
        l_decrease_max=float(max(0.0, -dl.min())) if dl.size else 0.0,
        positivity_time=_first_positive(times, states, POSITIVITY_THRESHOLD),
    )
    return Trajectory(schedule, times, states, switch_indices, monitors, cfg)


def _first_positive(times, states, threshold):
    ok = np.all(states > threshold, axis=1)
    if not ok.any():
        return None
    return float(times[int(np.argmax(ok))])


def first_positivity_time(traj: Trajectory, threshold: float = POSITIVITY_THRESHOLD):
    return _first_positive(traj.times, traj.states, threshold)
