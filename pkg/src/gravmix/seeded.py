"""Seeded classical model: two clashing beams with evolving mixing angles.

Each beam carries a mixing angle between its original species and the
conversion target; a small initial angle (the seed) triggers a runaway to
the 50-50 point and beyond. In dimensionless time the symmetric case has
the closed form tan(theta(tau)) = tan(eps) * exp(2 tau), so the zero
crossing of zeta = cos(2 theta) sits at tau = ln(1/tan(eps)) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import TimeGrid, Trajectory, first_zero_crossing
from .errors import ParameterError


@dataclass
class MixingAngles:
    """Instantaneous mixing angles of the two beams (radians)."""

    theta_a: float
    theta_b: float

    def __post_init__(self):
        if not (math.isfinite(self.theta_a) and math.isfinite(self.theta_b)):
            raise ParameterError("mixing angles must be finite")


@dataclass(frozen=True)
class BeamPair:
    """Mean occupations and initial seed angles of the clashing beams."""

    n_a: float
    n_b: float
    seed_a: float
    seed_b: float

    def __post_init__(self):
        if not (self.n_a > 0 and self.n_b > 0):
            raise ParameterError("beam occupations must be positive")
        if self.seed_a < 0 or self.seed_b < 0:
            raise ParameterError("seed angles must be non-negative")

    def rates(self) -> tuple[float, float]:
        """Occupations normalized so equal beams give unit rates."""
        mean = 0.5 * (self.n_a + self.n_b)
        return self.n_a / mean, self.n_b / mean


def seeded_derivs(state: MixingAngles, beams: BeamPair) -> tuple[float, float]:
    """Angle velocities (d theta_a / dtau, d theta_b / dtau).

    Each angle is driven by the opposite beam's occupation:
    d theta_a = r_b sin(2 theta_b), d theta_b = r_a sin(2 theta_a).
    """
    r_a, r_b = beams.rates()
    return (
        r_b * math.sin(2.0 * state.theta_b),
        r_a * math.sin(2.0 * state.theta_a),
    )


def run_seeded(beams: BeamPair, grid: TimeGrid) -> Trajectory:
    """Evolve the seeded pair; zeta = cos(2 theta_a), with theta_b audited."""
    r_a, r_b = beams.rates()
    angles = kernels.rk4_two_angles(
        beams.seed_a, beams.seed_b, r_a, r_b, grid.dt, grid.n_steps, grid.sample_every
    )
    zeta = np.cos(2.0 * angles[:, 0])
    zeta_b = np.cos(2.0 * angles[:, 1])
    return Trajectory(grid.times(), zeta, {"zeta_b": zeta_b})


def break_time_vs_seed(beams: BeamPair, seeds, grid: TimeGrid | None = None):
    """First zero crossing of zeta for each seed applied to both beams.

    Returns a list of (seed, crossing-time-or-None) pairs; None records a
    seed whose trajectory never crossed within the grid.
    """
    if grid is None:
        grid = TimeGrid.to(25.0)
    out = []
    for seed in seeds:
        if not 0.0 < seed < math.pi / 4.0:
            raise ParameterError(f"seed angle {seed} outside (0, pi/4)")
        pair = BeamPair(beams.n_a, beams.n_b, seed, seed)
        traj = run_seeded(pair, grid)
        out.append((float(seed), first_zero_crossing(traj)))
    return out


def symmetric_crossing_time(seed: float) -> float:
    """Closed-form crossing for equal beams seeded on both sides."""
    return 0.5 * math.log(1.0 / math.tan(seed))
