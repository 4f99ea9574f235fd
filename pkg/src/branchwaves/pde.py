"""Method-of-lines front simulator.

Advances the two-field system on a uniform grid with a second-order
central Laplacian on the diffusing field, zero-flux ends, and a fixed-dt
classical four-stage Runge-Kutta step obeying both the diffusive and the
reaction stability bounds. Includes front tracking, speed measurement,
and extraction of comoving profiles for comparison with shot waves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BlowUpError, ContaminatedMeasurementError, DomainError
from .model import Params, pde_rhs

# dt <= DIFFUSIVE_CFL * dx^2 and dt <= REACTION_DT_CAP
DIFFUSIVE_CFL = 0.4
REACTION_DT_CAP = 0.1

BOUNDARY_MARGIN_CELLS = 10


@dataclass(frozen=True)
class Grid:
    """Uniform grid of n points spanning [x_min, x_max]."""

    x_min: float
    x_max: float
    n: int
    dx: float = field(init=False)

    def __post_init__(self):
        if self.n < 16:
            raise DomainError(f"need at least 16 grid points, got {self.n}")
        if not self.x_max > self.x_min:
            raise DomainError(
                f"empty domain [{self.x_min}, {self.x_max}]"
            )
        object.__setattr__(self, "dx", (self.x_max - self.x_min) / (self.n - 1))

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass
class FieldSeries:
    """Snapshots (A, I) of one simulation at the recorded times."""

    grid: Grid
    times: np.ndarray
    snapshots: list[tuple[np.ndarray, np.ndarray]]

    def __len__(self):
        return len(self.times)

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Snapshot at time t (must match a recorded time)."""
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-9:
            raise DomainError(
                f"t = {t} not in the recorded times "
                f"[{self.times[0]:g}, {self.times[-1]:g}] "
                f"(spacing {self.times[1] - self.times[0]:g})"
                if len(self.times) > 1
                else f"t = {t} not recorded"
            )
        return self.snapshots[k]


def _snapshot_times(t_end: float, snapshot_dt: float) -> np.ndarray:
    n_whole = int(math.floor(t_end / snapshot_dt + 1e-9))
    times = snapshot_dt * np.arange(n_whole + 1)
    if times[-1] < t_end - 1e-9 * max(t_end, 1.0):
        times = np.append(times, t_end)
    else:
        times[-1] = t_end
    return times


def _rk4_interval(A, I, p, dx, span, dt_cap):
    n_sub = max(1, int(math.ceil(span / dt_cap - 1e-12)))
    dt = span / n_sub
    for _ in range(n_sub):
        kA1, kI1 = pde_rhs(A, I, p, dx)
        kA2, kI2 = pde_rhs(A + 0.5 * dt * kA1, I + 0.5 * dt * kI1, p, dx)
        kA3, kI3 = pde_rhs(A + 0.5 * dt * kA2, I + 0.5 * dt * kI2, p, dx)
        kA4, kI4 = pde_rhs(A + dt * kA3, I + dt * kI3, p, dx)
        A = A + (dt / 6.0) * (kA1 + 2.0 * kA2 + 2.0 * kA3 + kA4)
        I = I + (dt / 6.0) * (kI1 + 2.0 * kI2 + 2.0 * kI3 + kI4)
    return A, I


def simulate(A0, I0, p: Params, grid: Grid, t_end: float,
             snapshot_dt: float = 0.5) -> FieldSeries:
    """Advance the system to t_end, recording a snapshot every snapshot_dt.

    The step size obeys dt <= 0.4 dx^2 (diffusion) and dt <= 0.1
    (reaction) and divides each snapshot interval exactly. Non-finite
    values raise BlowUpError carrying the series recorded so far.
    """
    A = np.array(A0, dtype=float)
    I = np.array(I0, dtype=float)
    if A.shape != (grid.n,) or I.shape != (grid.n,):
        raise ValueError(
            f"fields must have shape ({grid.n},), got {A.shape} and {I.shape}"
        )
    if t_end <= 0.0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    if snapshot_dt <= 0.0:
        raise DomainError(f"snapshot_dt must be positive, got {snapshot_dt}")

    dt_cap = min(DIFFUSIVE_CFL * grid.dx * grid.dx, REACTION_DT_CAP)
    times = _snapshot_times(t_end, snapshot_dt)
    snaps = [(A.copy(), I.copy())]

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, len(times)):
            A, I = _rk4_interval(A, I, p, grid.dx, times[k] - times[k - 1], dt_cap)
            if not (np.isfinite(A).all() and np.isfinite(I).all()):
                raise BlowUpError(
                    f"non-finite field values by t = {times[k]:g}",
                    series=FieldSeries(grid, times[:k], snaps),
                )
            snaps.append((A.copy(), I.copy()))
    return FieldSeries(grid, times, snaps)


def front_position(A, grid: Grid, threshold: float) -> float:
    """Largest x where A crosses threshold, linearly interpolated.

    Returns -inf when A stays below threshold everywhere; returns
    grid.x_max when A is still above threshold at the right end (the
    front has left the domain).
    """
    if threshold <= 0.0:
        raise DomainError(f"threshold must be positive, got {threshold}")
    A = np.asarray(A, dtype=float)
    above = np.nonzero(A >= threshold)[0]
    if above.size == 0:
        return -math.inf
    j = int(above[-1])
    if j == grid.n - 1:
        return grid.x_max
    x_j = grid.x_min + j * grid.dx
    return x_j + grid.dx * (threshold - A[j]) / (A[j + 1] - A[j])


class SpeedMeasurement(NamedTuple):
    c_est: float
    residual: float


def measure_speed(series: FieldSeries, threshold: float,
                  window: tuple[float, float]) -> SpeedMeasurement:
    """Least-squares front speed over a time window.

    The front must stay at least 10 grid cells away from both domain
    ends throughout the window; otherwise the measurement counts as
    contaminated.
    """
    t1, t2 = window
    times = series.times
    if not (times[0] <= t1 < t2 <= times[-1]):
        raise DomainError(
            f"window ({t1}, {t2}) not inside simulated times "
            f"[{times[0]:g}, {times[-1]:g}]"
        )
    sel = (times >= t1 - 1e-12) & (times <= t2 + 1e-12)
    if np.count_nonzero(sel) < 2:
        raise DomainError("window covers fewer than two snapshots")

    grid = series.grid
    margin = BOUNDARY_MARGIN_CELLS * grid.dx
    fronts = []
    for k in np.nonzero(sel)[0]:
        x_f = front_position(series.snapshots[k][0], grid, threshold)
        if not (grid.x_min + margin <= x_f <= grid.x_max - margin):
            raise ContaminatedMeasurementError(
                f"front at x = {x_f:g} (t = {times[k]:g}) is within "
                f"{BOUNDARY_MARGIN_CELLS} cells of the boundary"
            )
        fronts.append(x_f)

    ts = times[sel]
    slope, intercept = np.polyfit(ts, fronts, 1)
    fit = slope * ts + intercept
    residual = float(np.sqrt(np.mean((fit - np.asarray(fronts)) ** 2)))
    return SpeedMeasurement(float(slope), residual)


class ComovingProfile(NamedTuple):
    z: np.ndarray
    a: np.ndarray
    i: np.ndarray


def comoving_profile(series: FieldSeries, t: float, c_est: float,
                     anchor: float) -> ComovingProfile:
    """Snapshot at time t on the front-anchored coordinate z = x - x_front.

    The anchor threshold crossing sits at z = 0. When the snapshot never
    reaches the anchor level (no front), the nominal position c_est * t
    anchors the shift instead.
    """
    A, I = series.at(t)
    x_front = front_position(A, series.grid, anchor)
    if not math.isfinite(x_front):
        x_front = c_est * t
    z = series.grid.xs() - x_front
    return ComovingProfile(z, A.copy(), I.copy())
