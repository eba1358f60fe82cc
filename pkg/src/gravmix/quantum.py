"""Exact quantum evolution on the collective conversion ladder.

For equal occupations N per cloud only N+1 collective states take part:
|i> holds i converted pairs. The Hamiltonian is symmetric tridiagonal with
off-diagonal elements i(N-i+1) plus an optional diagonal -(lambda/2)(N-2i)^2
from the flavor-diagonal coupling. Time is measured in collective units,
which amounts to scaling the matrix by 1/N before exponentiating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (
    LawCoefficient,
    ScalingFit,
    TimeGrid,
    Trajectory,
    first_zero_crossing,
    fit_log_law,
    fit_log_scaling,
)
from .errors import ParameterError, SolverError

#: Norm drift tolerated on ladder states.
NORM_TOL = 1e-9


@dataclass(frozen=True)
class LadderHamiltonian:
    """Tridiagonal collective Hamiltonian in raw coupling units (g/V)."""

    n: int
    lam: float
    offdiag: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)

    def scaled(self) -> tuple[np.ndarray, np.ndarray]:
        """(diag, offdiag) divided by N: dimensionless-time generator."""
        return self.diag / self.n, self.offdiag / self.n

    def dense(self, scaled: bool = True) -> np.ndarray:
        d, e = self.scaled() if scaled else (self.diag, self.offdiag)
        h = np.diag(d.astype(float))
        idx = np.arange(self.n)
        h[idx, idx + 1] = e
        h[idx + 1, idx] = e
        return h


@dataclass
class LadderState:
    """Complex amplitudes over the N+1 conversion-number states."""

    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.ndim != 1 or self.amps.size < 2:
            raise ParameterError("ladder state must be a vector of at least 2 amplitudes")
        norm = float(np.sum(np.abs(self.amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ParameterError(f"ladder state norm {norm} deviates from 1 beyond {NORM_TOL}")

    @classmethod
    def all_gravitons(cls, n: int) -> "LadderState":
        amps = np.zeros(n + 1, dtype=complex)
        amps[0] = 1.0
        return cls(amps)


def build_ladder(n: int, lam: float = 0.0) -> LadderHamiltonian:
    """Collective ladder Hamiltonian for N pairs and diagonal coupling lambda.

    offdiag[i] = i (N - i + 1) for i = 1..N; diag[i] = -(lambda/2) (N - 2i)^2.
    """
    if n < 1:
        raise ParameterError(f"pair count must be >= 1, got {n}")
    i = np.arange(1, n + 1, dtype=float)
    offdiag = i * (n - i + 1.0)
    j = np.arange(0, n + 1, dtype=float)
    diag = -(lam / 2.0) * (n - 2.0 * j) ** 2
    return LadderHamiltonian(n=n, lam=float(lam), offdiag=offdiag, diag=diag)


def _eigensystem(h: LadderHamiltonian):
    d, e = h.scaled()
    try:
        return scipy.linalg.eigh_tridiagonal(d, e)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:  # pragma: no cover
        raise SolverError(
            f"tridiagonal eigensolver failed for N={h.n}, lambda={h.lam}: {exc}"
        ) from exc


def amplitudes_at(h: LadderHamiltonian, times) -> np.ndarray:
    """State amplitudes at the given times, starting from |i=0>.

    Uses the eigendecomposition of the symmetric tridiagonal matrix, so any
    time is reached in one shot ("exact" up to spectral-solver tolerance).
    Returns an array of shape (len(times), N+1).
    """
    times = np.asarray(times, dtype=float)
    energies, vecs = _eigensystem(h)
    coef = vecs[0, :]  # <E_k | i=0>, real for a real symmetric matrix
    out = np.empty((times.size, h.n + 1), dtype=complex)
    chunk = max(1, int(2**22 // max(h.n + 1, 1)))
    weighted = vecs * coef[np.newaxis, :]
    for lo in range(0, times.size, chunk):
        hi = min(lo + chunk, times.size)
        phases = np.exp(-1j * np.outer(energies, times[lo:hi]))
        out[lo:hi] = (weighted @ phases).T
    return out


def _zeta_weights(n: int) -> np.ndarray:
    return (n - 2.0 * np.arange(0, n + 1)) / n


def evolve_ladder(h: LadderHamiltonian, grid: TimeGrid, method: str = "eig") -> Trajectory:
    """Evolve |i=0> and sample zeta(tau) = <sigma3>/N on the grid.

    ``method="eig"`` (default) propagates through the eigenbasis;
    ``method="rk4"`` time-steps the Schrodinger equation at grid.dt as a
    cross-validation fallback (mind the spectral radius ~ N/2 when choosing
    dt). Audits: state norm, energy expectation, and <sigma3 + tau3>.
    """
    times = grid.times()
    if method == "eig":
        amps = amplitudes_at(h, times)
    elif method == "rk4":
        amps = _amplitudes_rk4(h, grid)
    else:
        raise ParameterError(f"unknown evolution method {method!r}")

    probs = np.abs(amps) ** 2
    norm = probs.sum(axis=1)
    zeta = probs @ _zeta_weights(h.n)
    d, e = h.scaled()
    energy = np.einsum("ti,i,ti->t", amps.conj(), d, amps).real + 2.0 * np.einsum(
        "ti,i,ti->t", amps[:, :-1].conj(), e, amps[:, 1:]
    ).real
    # zeta stays within [-1, 1] up to solver roundoff; clip that roundoff.
    zeta = np.clip(zeta / norm, -1.0, 1.0)
    return Trajectory(
        times,
        zeta,
        {"norm": norm, "energy": energy, "sum_s3_t3": np.zeros_like(norm)},
    )


def _amplitudes_rk4(h: LadderHamiltonian, grid: TimeGrid) -> np.ndarray:
    from .core import integrate

    d, e = h.scaled()

    def deriv(_t, psi):
        hpsi = d * psi
        hpsi[:-1] += e * psi[1:]
        hpsi[1:] += e * psi[:-1]
        return -1j * hpsi

    psi0 = LadderState.all_gravitons(h.n).amps
    _times, states = integrate(deriv, psi0, grid)
    return states


@dataclass(frozen=True)
class BreakTimeScan:
    """Crossing times over an N scan plus the log-N fits through them.

    ``fit`` is the with-intercept least-squares line; ``law`` is the
    no-intercept proportionality T = c ln N whose coefficient is directly
    comparable to the quoted break-time constant. Either is None when the
    scan is too degenerate to fit (fewer than 3 crossings or a single
    distinct N).
    """

    crossings: tuple
    excluded: tuple
    fit: ScalingFit | None
    law: LawCoefficient | None


def default_horizon(n: int, lam: float = 0.0) -> float:
    """Comfortable horizon for locating the first crossing."""
    base = 0.65 * math.log(max(n, 2))
    slowdown = 1.0 / max(1.0 - abs(lam), 0.25)
    return max(6.0, 2.5 * base * slowdown)


def break_time_scan(ns, lam: float = 0.0, dt: float = 1e-3, horizon: float | None = None) -> BreakTimeScan:
    """First-crossing times for each N, fitted against ln N.

    Runs with no crossing inside the horizon are excluded from the fit and
    reported separately.
    """
    ns = [int(n) for n in ns]
    if any(n < 2 for n in ns):
        raise ParameterError("scan requires N >= 2")
    crossings = []
    excluded = []
    for n in ns:
        h = build_ladder(n, lam)
        grid = TimeGrid.to(horizon if horizon is not None else default_horizon(n, lam), dt)
        t_cross = first_zero_crossing(evolve_ladder(h, grid))
        if t_cross is None:
            excluded.append(n)
        else:
            crossings.append((n, t_cross))
    fit = law = None
    if len(crossings) >= 3 and len({n for n, _ in crossings}) >= 2:
        fit = fit_log_scaling(crossings)
        law = fit_log_law(crossings)
    return BreakTimeScan(tuple(crossings), tuple(excluded), fit, law)


@dataclass(frozen=True)
class TurnoverProbe:
    """Outcome of a single lambda probe run."""

    lam: float
    turnover_time: float | None
    min_zeta: float
    horizon: float

    @property
    def turned_over(self) -> bool:
        return self.turnover_time is not None


def lambda_turnover_probe(n: int, lambdas, dt: float = 1e-3, horizon: float | None = None):
    """Classify each lambda as turning over (zeta crosses 0) or not.

    The horizon defaults to 5x the lambda = 0 crossing time so a missing
    turnover is meaningful.
    """
    if n < 2:
        raise ParameterError("probe requires N >= 2")
    if horizon is None:
        base = first_zero_crossing(
            evolve_ladder(build_ladder(n, 0.0), TimeGrid.to(default_horizon(n), dt))
        )
        if base is None:  # pragma: no cover
            raise SolverError(f"reference lambda=0 run for N={n} never crossed zero")
        horizon = 5.0 * base
    results = {}
    for lam in lambdas:
        traj = evolve_ladder(build_ladder(n, lam), TimeGrid.to(horizon, dt))
        results[float(lam)] = TurnoverProbe(
            lam=float(lam),
            turnover_time=first_zero_crossing(traj),
            min_zeta=float(np.min(traj.zeta)),
            horizon=float(horizon),
        )
    return results
