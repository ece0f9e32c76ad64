"""Piecewise-constant switching schedules and the three standing assumptions.

A schedule is a list of segments ``(tau_k, pool_index)``. Periodic schedules
repeat their segment list forever; finite ones end after the last segment.
Segment ``k`` is active on ``[t_k, t_{k+1})``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .core_types import DEFAULT_TOL, InteractionMatrix, support_graph
from .errors import InvalidParameter, NotDoublyStochastic, OutOfHorizon
from .graph import DirectedGraph

SNAP = 1e-12


@dataclass(frozen=True)
class DwellBounds:
    lower: float
    upper: float


class SwitchingSchedule:
    def __init__(
        self,
        pool: Sequence[InteractionMatrix],
        segments: Sequence[tuple],
        periodic: bool = True,
        t0: float = 0.0,
    ):
        pool = tuple(pool)
        segments = tuple((float(tau), int(idx)) for tau, idx in segments)
        if not pool:
            raise InvalidParameter("matrix pool is empty")
        if not segments:
            raise InvalidParameter("schedule has no segments")
        n = pool[0].n
        if any(C.n != n for C in pool):
            raise InvalidParameter("pool matrices disagree on n")
        for tau, idx in segments:
            if not (tau > 0 and math.isfinite(tau)):
                raise InvalidParameter(f"dwell times must be positive, got {tau!r}")
            if not 0 <= idx < len(pool):
                raise InvalidParameter(f"matrix index {idx} outside pool of {len(pool)}")
        self.pool = pool
        self.segments = segments
        self.periodic = bool(periodic)
        self.t0 = float(t0)
        self.n = n
        dwells = [tau for tau, _ in segments]
        # offsets[k] = t_k - t0 within one pass, fsum keeps long sums drift-free
        self._offsets = [math.fsum(dwells[:k]) for k in range(len(dwells) + 1)]
        self.period = self._offsets[-1]

    @classmethod
    def cycle(cls, matrices, dwell, periodic=True, t0=0.0):
        """Schedule visiting ``matrices`` in order, each for ``dwell``
        (scalar, or one value per matrix)."""
        matrices = list(matrices)
        if isinstance(dwell, (int, float)):
            dwell = [float(dwell)] * len(matrices)
        if len(dwell) != len(matrices):
            raise InvalidParameter("need one dwell per matrix")
        return cls(matrices, list(zip(dwell, range(len(matrices)))), periodic, t0)

    @classmethod
    def constant(cls, C, dwell):
        return cls.cycle([C], dwell)

    def __repr__(self):
        kind = "periodic" if self.periodic else "finite"
        return f"SwitchingSchedule(n={self.n}, segments={len(self.segments)}, {kind})"

    @property
    def segments_per_pass(self) -> int:
        return len(self.segments)

    @property
    def end_time(self) -> float:
        return math.inf if self.periodic else self.t0 + self.period

    def _resolve(self, k: int) -> tuple:
        if k < 0:
            raise OutOfHorizon(f"segment index {k} is negative")
        p = len(self.segments)
        if self.periodic:
            return divmod(k, p)
        if k >= p:
            raise OutOfHorizon(f"segment {k} beyond finite schedule of {p} segments")
        return 0, k

    def switch_time(self, k: int) -> float:
        """``t_k``; ``k`` may equal the segment count of a finite schedule
        (its end time)."""
        p = len(self.segments)
        if not self.periodic and k == p:
            return self.t0 + self.period
        q, r = self._resolve(k)
        return self.t0 + q * self.period + self._offsets[r]

    def dwell(self, k: int) -> float:
        return self.segments[self._resolve(k)[1]][0]

    def matrix_index(self, k: int) -> int:
        return self.segments[self._resolve(k)[1]][1]

    def matrix_for_segment(self, k: int) -> InteractionMatrix:
        return self.pool[self.matrix_index(k)]

    def segment_at(self, t: float) -> int:
        """Index ``k`` with ``t_k <= t < t_{k+1}``.

        Times within a relative ``SNAP`` of a switch instant count as that
        instant, so ``3 * 0.4`` and ``1.2`` resolve to the same segment.
        """
        if t < self.t0 - SNAP * max(1.0, abs(self.t0)):
            raise OutOfHorizon(f"t={t!r} precedes t0={self.t0!r}")
        eps = SNAP * max(1.0, abs(t))
        s = t - self.t0
        q = 0
        if self.periodic:
            q = max(0, math.floor(s / self.period) - 1)
        elif s >= self.period - eps:
            raise OutOfHorizon(f"t={t!r} is past the end of the schedule")
        r = bisect.bisect_right(self._offsets, s - q * self.period) - 1
        k = q * len(self.segments) + max(0, min(r, len(self.segments) - 1))
        while k > 0 and t < self.switch_time(k) - eps:
            k -= 1
        while (self.periodic or k + 1 < len(self.segments)) and t >= self.switch_time(k + 1) - eps:
            k += 1
        return k

    def matrix_at(self, t: float) -> InteractionMatrix:
        return self.matrix_for_segment(self.segment_at(t))

    def used_indices(self):
        return sorted({idx for _, idx in self.segments})

    def iter_segments(self, horizon: float):
        """Yield ``(k, start, end, matrix)`` covering ``[t0, horizon]``; the
        final segment is truncated at ``horizon``."""
        if horizon <= self.t0:
            return
        if horizon > self.end_time:
            raise OutOfHorizon(f"horizon {horizon!r} beyond schedule end {self.end_time!r}")
        k = 0
        while True:
            start = self.switch_time(k)
            if start >= horizon:
                return
            end = min(self.switch_time(k + 1), horizon)
            yield k, start, end, self.matrix_for_segment(k)
            k += 1


def dwell_bounds(schedule: SwitchingSchedule) -> DwellBounds:
    dwells = [tau for tau, _ in schedule.segments]
    return DwellBounds(min(dwells), max(dwells))


def union_graph(schedule: SwitchingSchedule, start: int, window: int) -> DirectedGraph:
    if window < 1:
        raise InvalidParameter("window B must be >= 1")
    if not schedule.periodic and start + window > len(schedule.segments):
        raise OutOfHorizon(
            f"window [{start}, {start + window}) exceeds {len(schedule.segments)} segments"
        )
    g = DirectedGraph(schedule.n, frozenset())
    for k in range(start, start + window):
        g = g.union(support_graph(schedule.matrix_for_segment(k)))
    return g


def verify_assumption1(schedule: SwitchingSchedule, tol: float = DEFAULT_TOL) -> float:
    """Return the common lower bound ``gamma`` on nonzero weights, or raise
    :class:`NotDoublyStochastic` for the first offending pool matrix."""
    gamma = math.inf
    for idx in schedule.used_indices():
        C = schedule.pool[idx]
        dev = C.column_deviation
        if dev > tol:
            raise NotDoublyStochastic(idx, dev)
        gamma = min(gamma, C.gamma)
    return gamma


def _window_starts(schedule: SwitchingSchedule, window: int):
    if schedule.periodic:
        return range(len(schedule.segments))
    return range(max(0, len(schedule.segments) - window + 1))


def verify_assumption2(schedule: SwitchingSchedule, window: int) -> bool:
    starts = _window_starts(schedule, window)
    if len(starts) == 0:
        return False
    return all(union_graph(schedule, l, window).is_strongly_connected() for l in starts)


def smallest_window(schedule: SwitchingSchedule, cap: Optional[int] = None) -> Optional[int]:
    """Smallest ``B`` meeting the union-connectivity assumption, scanning up
    to ``cap`` (default ``n * segments_per_pass``); ``None`` if none does."""
    if cap is None:
        cap = schedule.n * len(schedule.segments)
    if not schedule.periodic:
        cap = min(cap, len(schedule.segments))
    for B in range(1, cap + 1):
        if verify_assumption2(schedule, B):
            return B
    return None


@dataclass
class AssumptionReport:
    doubly_stochastic: bool
    gamma: Optional[float]
    offending_index: Optional[int]
    window: Optional[int]
    union_connected: bool
    dwell: DwellBounds

    @property
    def all_hold(self) -> bool:
        return self.doubly_stochastic and self.union_connected

    def as_dict(self):
        return {
            "assumption1": {
                "holds": self.doubly_stochastic,
                "gamma": self.gamma,
                "offending_matrix": self.offending_index,
            },
            "assumption2": {"holds": self.union_connected, "B": self.window},
            "assumption3": {
                "holds": True,
                "tau_lower": self.dwell.lower,
                "tau_upper": self.dwell.upper,
            },
            "all_hold": self.all_hold,
        }


def check_assumptions(
    schedule: SwitchingSchedule, window: Optional[int] = None, tol: float = DEFAULT_TOL
) -> AssumptionReport:
    """Evaluate all three assumptions. With ``window=None`` the smallest
    feasible window is searched for."""
    try:
        gamma, offending, ds = verify_assumption1(schedule, tol), None, True
    except NotDoublyStochastic as exc:
        gamma, offending, ds = None, exc.matrix_index, False
    if window is None:
        window = smallest_window(schedule)
        connected = window is not None
    else:
        connected = verify_assumption2(schedule, window)
    return AssumptionReport(ds, gamma, offending, window, connected, dwell_bounds(schedule))
