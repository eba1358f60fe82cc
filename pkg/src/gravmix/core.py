"""Shared numerics: fixed-step integration, trajectory analysis, log fits.

All solver time in this package is dimensionless, tau = t * g * n, so the
grid and trajectory types carry no physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, SolverError

#: Tolerance on |zeta| <= 1 used when validating trajectories.
ZETA_BOUND_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid on [t_start, t_end] with step dt.

    ``sample_every`` thins the recorded output: states are stored every that
    many steps (the first and last step are always recorded). Integration
    itself always proceeds at dt.
    """

    t_start: float
    t_end: float
    dt: float = 1e-3
    sample_every: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ParameterError("grid endpoints must be finite")
        if not self.t_end > self.t_start:
            raise ParameterError(f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.dt > (self.t_end - self.t_start):
            raise ParameterError("dt must not exceed the grid span")
        if self.sample_every < 1:
            raise ParameterError("sample_every must be >= 1")

    @classmethod
    def to(cls, horizon: float, dt: float = 1e-3, sample_every: int = 1) -> "TimeGrid":
        """Grid on [0, horizon]."""
        return cls(0.0, horizon, dt, sample_every)

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.t_end - self.t_start) / self.dt)))

    def sampled_steps(self) -> np.ndarray:
        """Indices of the recorded steps (0, k, 2k, ..., n_steps)."""
        ks = list(range(0, self.n_steps + 1, self.sample_every))
        if ks[-1] != self.n_steps:
            ks.append(self.n_steps)
        return np.asarray(ks, dtype=np.int64)

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * self.sampled_steps()


@dataclass
class Trajectory:
    """Time series of the flavor diagnostic zeta plus named audit channels."""

    times: np.ndarray
    zeta: np.ndarray
    audits: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.zeta = np.asarray(self.zeta, dtype=float)
        if self.times.size == 0:
            raise ParameterError("trajectory must hold at least one sample")
        if self.zeta.shape != self.times.shape:
            raise ParameterError("zeta and times must have matching lengths")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ParameterError("times must be strictly increasing")
        if np.max(np.abs(self.zeta)) > 1.0 + ZETA_BOUND_TOL:
            raise ParameterError("zeta out of [-1, 1] beyond tolerance")
        self.audits = {k: np.asarray(v, dtype=float) for k, v in self.audits.items()}
        for name, chan in self.audits.items():
            if chan.shape != self.times.shape:
                raise ParameterError(f"audit channel {name!r} length mismatch")


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line T = slope * ln(N) + intercept."""

    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self):
        if not -1e-9 <= self.r_squared <= 1.0 + 1e-9:
            raise ParameterError(f"r_squared out of [0, 1]: {self.r_squared}")


@dataclass(frozen=True)
class LawCoefficient:
    """Proportionality fit T = c * ln(N), i.e. the line forced through zero.

    r_squared is the uncentered coefficient of determination (residuals
    measured against sum T^2), the standard choice for a no-intercept model.
    """

    coefficient: float
    r_squared: float


def integrate(deriv, y0, grid: TimeGrid):
    """Fixed-step classical RK4 over the grid.

    Parameters
    ----------
    deriv : callable
        ``deriv(t, y) -> dy/dt``; y may be a scalar or ndarray, real or
        complex.
    y0 : array_like
        Initial state.
    grid : TimeGrid

    Returns
    -------
    (times, states) : recorded times and the state at each of them; states
    has the sampled index on axis 0.

    Raises
    ------
    SolverError
        If the state stops being finite; the message carries the step index.
    """
    y = np.asarray(y0)
    if not np.issubdtype(y.dtype, np.inexact):
        y = y.astype(float)
    dt = grid.dt
    n = grid.n_steps
    record = set(grid.sampled_steps().tolist())

    out = []
    for k in range(n + 1):
        if not np.all(np.isfinite(y)):
            raise SolverError(f"non-finite state at step {k} (t = {grid.t_start + k * dt:g})")
        if k in record:
            out.append(y.copy())
        if k == n:
            break
        t = grid.t_start + k * dt
        k1 = np.asarray(deriv(t, y))
        k2 = np.asarray(deriv(t + 0.5 * dt, y + 0.5 * dt * k1))
        k3 = np.asarray(deriv(t + 0.5 * dt, y + 0.5 * dt * k2))
        k4 = np.asarray(deriv(t + dt, y + dt * k3))
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return grid.times(), np.asarray(out)


def first_zero_crossing(traj: Trajectory) -> float | None:
    """Linearly interpolated time of the first sign change of zeta.

    Samples landing exactly on zero count as crossings and the earliest such
    sample wins. Returns None when zeta never changes sign.
    """
    z = traj.zeta
    t = traj.times
    exact = np.flatnonzero(z == 0.0)
    first_exact = int(exact[0]) if exact.size else None
    sign_flip = np.flatnonzero(z[:-1] * z[1:] < 0.0)
    first_flip = int(sign_flip[0]) if sign_flip.size else None

    if first_exact is None and first_flip is None:
        return None
    if first_flip is None or (first_exact is not None and first_exact <= first_flip):
        return float(t[first_exact])
    i = first_flip
    frac = z[i] / (z[i] - z[i + 1])
    return float(t[i] + frac * (t[i + 1] - t[i]))


def fit_log_scaling(points) -> ScalingFit:
    """Fit T = slope * ln(N) + intercept to (N, T) pairs (natural log).

    Requires at least 3 points with N >= 2 and finite T.
    """
    pts = list(points)
    if len(pts) < 3:
        raise ParameterError(f"need at least 3 points for a scaling fit, got {len(pts)}")
    ns = np.asarray([p[0] for p in pts], dtype=float)
    ts = np.asarray([p[1] for p in pts], dtype=float)
    if np.any(ns < 2):
        raise ParameterError("all N must be >= 2")
    if not np.all(np.isfinite(ts)):
        raise ParameterError("all T must be finite")

    x = np.log(ns)
    xm, ym = x.mean(), ts.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0.0:
        raise ParameterError("N values must not all coincide")
    slope = float(np.sum((x - xm) * (ts - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = ts - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ts - ym) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return ScalingFit(slope, intercept, min(max(r2, 0.0), 1.0))


def fit_log_law(points) -> LawCoefficient:
    """Fit the proportionality law T = c * ln(N) (no intercept).

    This is the form the break-time law takes, so its coefficient is the
    number to compare against the law's quoted constant; the with-intercept
    fit of :func:`fit_log_scaling` answers a different question (local slope
    of T against ln N) and comes out lower whenever the intercept is
    positive.
    """
    pts = list(points)
    if len(pts) < 3:
        raise ParameterError(f"need at least 3 points for a law fit, got {len(pts)}")
    ns = np.asarray([p[0] for p in pts], dtype=float)
    ts = np.asarray([p[1] for p in pts], dtype=float)
    if np.any(ns < 2):
        raise ParameterError("all N must be >= 2")
    if not np.all(np.isfinite(ts)):
        raise ParameterError("all T must be finite")
    x = np.log(ns)
    c = float(np.dot(x, ts) / np.dot(x, x))
    ss_res = float(np.sum((ts - c * x) ** 2))
    ss_tot = float(np.sum(ts**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LawCoefficient(c, min(max(r2, 0.0), 1.0))
