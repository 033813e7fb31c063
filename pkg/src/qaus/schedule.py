"""Annealing schedules: the locally adiabatic curve and linearizations.

The locally adiabatic schedule satisfies ds/dt = eps * delta(s)^2 and,
with boundary conditions s(0) = 0, s(T) = 1, has the closed form

    s(t) = 1/2 + tan((2t/T - 1) * atan(sqrt(N-1))) / (2 sqrt(N-1)),
    T    = N / (eps sqrt(N-1)) * atan(sqrt(N-1))  ~  (pi / 2 eps) sqrt(N).

Piecewise-linear schedules join k+1 equally spaced time knots that lie
exactly on the curve above; k = 1 is the plain linear ramp.
"""

from dataclasses import dataclass, field

import numpy as np

from .spectrum import gap

__all__ = [
    "ScheduleParams",
    "Schedule",
    "total_time",
    "asymptotic_total_time",
    "s_exact",
    "exact_schedule",
    "piecewise_schedule",
]

# overshoot beyond [0, T] tolerated from adaptive steppers, relative to T
CLAMP_REL = 1e-9


def total_time(N: int, epsilon: float) -> float:
    """Total annealing time for the locally adiabatic schedule."""
    if N < 2:
        raise ValueError(f"need N >= 2, got {N}")
    if epsilon <= 0.0:
        raise ValueError(f"need epsilon > 0, got {epsilon}")
    return N / (epsilon * np.sqrt(N - 1.0)) * np.arctan(np.sqrt(N - 1.0))


def asymptotic_total_time(N: int, epsilon: float) -> float:
    """Large-N approximation (pi / 2 eps) sqrt(N), for reporting."""
    return 0.5 * np.pi * np.sqrt(N) / epsilon


@dataclass(frozen=True)
class ScheduleParams:
    N: int
    epsilon: float = 0.01

    def __post_init__(self):
        # validates N and epsilon as a side effect
        total_time(self.N, self.epsilon)

    @property
    def total_time(self) -> float:
        return total_time(self.N, self.epsilon)


def _clamp_time(t: float, T: float) -> float:
    if t < 0.0 or t > T:
        if t < -CLAMP_REL * T or t > T * (1.0 + CLAMP_REL):
            raise ValueError(f"time {t} outside [0, {T}]")
        t = min(max(t, 0.0), T)
    return t


def s_exact(t, params: ScheduleParams):
    """The locally adiabatic schedule s(t); exact at t = 0, T/2, T."""
    T = params.total_time
    if np.ndim(t) == 0:
        t = _clamp_time(float(t), T)
    r = np.sqrt(params.N - 1.0)
    s = 0.5 + np.tan((2.0 * np.asarray(t) / T - 1.0) * np.arctan(r)) / (2.0 * r)
    s = np.clip(s, 0.0, 1.0)
    # pin the boundary and midpoint values exactly
    s = np.where(np.asarray(t) == 0.0, 0.0, s)
    s = np.where(np.asarray(t) == T, 1.0, s)
    s = np.where(np.asarray(t) == 0.5 * T, 0.5, s)
    return s[()] if np.ndim(s) == 0 else s


@dataclass(frozen=True)
class Schedule:
    """A map t -> s(t) on [0, T]: either exact or piecewise linear.

    Piecewise schedules carry their knots; the exact schedule has the
    two boundary knots only.
    """

    kind: str  # "exact" or "piecewise"
    params: ScheduleParams
    knot_times: np.ndarray = field(default=None)
    knot_values: np.ndarray = field(default=None)

    @property
    def total_time(self) -> float:
        return self.params.total_time

    @property
    def pieces(self) -> int:
        return len(self.knot_times) - 1

    def s(self, t):
        if self.kind == "exact":
            return s_exact(t, self.params)
        T = self.total_time
        if np.ndim(t) == 0:
            t = _clamp_time(float(t), T)
        return np.interp(t, self.knot_times, self.knot_values)

    def ds_dt(self, t):
        """Schedule slope; for piecewise knots, the right-segment slope."""
        T = self.total_time
        if self.kind == "exact":
            return self.params.epsilon * gap(self.s(t), self.params.N) ** 2
        t = np.clip(t, 0.0, T)
        idx = np.searchsorted(self.knot_times, t, side="right") - 1
        idx = np.clip(idx, 0, self.pieces - 1)
        dt = np.diff(self.knot_times)
        dsv = np.diff(self.knot_values)
        return (dsv / dt)[idx]

    def samples(self, num: int = 512) -> tuple[np.ndarray, np.ndarray]:
        """(t, s) arrays for serialization and plotting."""
        t = np.linspace(0.0, self.total_time, num)
        return t, np.asarray(self.s(t))


def exact_schedule(params: ScheduleParams) -> Schedule:
    T = params.total_time
    return Schedule(
        kind="exact",
        params=params,
        knot_times=np.array([0.0, T]),
        knot_values=np.array([0.0, 1.0]),
    )


def piecewise_schedule(k: int, params: ScheduleParams) -> Schedule:
    """k-segment linear interpolation of the exact schedule.

    Knots sit at t_j = j T / k with s_j on the exact curve; k = 1 is
    the plain linear ramp.
    """
    if k < 1:
        raise ValueError(f"need at least one segment, got k={k}")
    T = params.total_time
    t = np.linspace(0.0, T, k + 1)
    s = np.array([s_exact(tj, params) for tj in t])
    return Schedule(kind="piecewise", params=params, knot_times=t, knot_values=s)
