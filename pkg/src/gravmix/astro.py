"""Feasibility arithmetic for a merger-driven conversion scenario.

Everything runs in natural units (hbar = c = 1) with energies in MeV;
boundary conversions live in one NaturalUnitContext so no literal constants
appear inside the operations. Every operation returns a provenance record
listing each intermediate value with its unit tag and the formula used, so
alternative geometric conventions can be audited line by line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ParameterError


@dataclass(frozen=True)
class MergerScenario:
    """Gravitational-wave luminosity and frequency of the source."""

    luminosity_erg_per_s: float
    frequency_hz: float

    def __post_init__(self):
        if self.luminosity_erg_per_s <= 0 or self.frequency_hz <= 0:
            raise ParameterError("luminosity and frequency must be positive")


@dataclass(frozen=True)
class NaturalUnitContext:
    """Conversion constants; MeV is the base energy unit.

    eight_pi_G carries MeV^-2 (that is what makes 8 pi G * n * T
    dimensionless with n in MeV^3 and T in MeV^-1).
    """

    eight_pi_G: float = 1.5e-43  # MeV^-2
    hbar_mev_s: float = 6.582e-22  # MeV * s
    mev_per_erg: float = 6.2415e5
    inv_mev_per_meter: float = 5.0677e12  # 1 m = 5.0677e12 MeV^-1
    alpha: float = 7.2973525693e-3
    m_e_mev: float = 0.51099895
    c_m_per_s: float = 299792458.0

    @property
    def inv_mev_per_second(self) -> float:
        """1 s in MeV^-1 (the reciprocal of hbar in MeV s)."""
        return 1.0 / self.hbar_mev_s

    @property
    def newton_g(self) -> float:
        """G itself, MeV^-2."""
        return self.eight_pi_G / (8.0 * math.pi)


@dataclass(frozen=True)
class Step:
    """One audited intermediate value."""

    name: str
    value: float
    unit: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "unit": self.unit, "note": self.note}


@dataclass(frozen=True)
class EstimateRecord:
    """Headline value plus the full provenance trail behind it."""

    name: str
    value: float
    unit: str
    formula: str
    steps: tuple[Step, ...] = ()
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "unit": self.unit,
            "formula": self.formula,
            "steps": [s.to_dict() for s in self.steps],
            "flags": dict(self.flags),
        }


def _mev_power(unit: str) -> int:
    """MeV exponent of a unit tag like 'MeV^3', 'MeV^-1', 'dimensionless'."""
    if unit == "dimensionless":
        return 0
    if unit == "MeV":
        return 1
    if unit.startswith("MeV^"):
        return int(unit[4:])
    raise ParameterError(f"unit tag {unit!r} has no MeV power")


def wavelength_mev_inv(frequency_hz: float, ctx: NaturalUnitContext) -> float:
    """One wavelength c/f expressed in MeV^-1."""
    return (ctx.c_m_per_s / frequency_hz) * ctx.inv_mev_per_meter


def quantum_energy_mev(frequency_hz: float, ctx: NaturalUnitContext) -> float:
    """Energy 2 pi f hbar of one quantum of the mode, in MeV."""
    return 2.0 * math.pi * frequency_hz * ctx.hbar_mev_s


def graviton_density(scenario: MergerScenario, ctx: NaturalUnitContext) -> EstimateRecord:
    """Number density implied by filling a one-wavelength-radius sphere.

    Convention: the sphere holds the energy radiated over the light-crossing
    time of its diameter (2 lambda_1 / c), divided among quanta of energy
    2 pi f hbar, inside volume (4/3) pi lambda_1^3. The diameter window
    matches the traversal-time convention used for the conversion figure of
    merit.
    """
    lam1_m = ctx.c_m_per_s / scenario.frequency_hz
    window_s = 2.0 * lam1_m / ctx.c_m_per_s
    energy_erg = scenario.luminosity_erg_per_s * window_s
    energy_mev = energy_erg * ctx.mev_per_erg
    e_quantum = quantum_energy_mev(scenario.frequency_hz, ctx)
    count = energy_mev / e_quantum
    lam1_inv_mev = lam1_m * ctx.inv_mev_per_meter
    volume = (4.0 / 3.0) * math.pi * lam1_inv_mev**3
    density = count / volume
    steps = (
        Step("luminosity", scenario.luminosity_erg_per_s, "erg/s"),
        Step("frequency", scenario.frequency_hz, "Hz"),
        Step("wavelength", lam1_m, "m", "lambda_1 = c / f"),
        Step("fill_window", window_s, "s", "diameter light-crossing time 2 lambda_1 / c"),
        Step("energy_in_sphere", energy_mev, "MeV", "L * window * mev_per_erg"),
        Step("quantum_energy", e_quantum, "MeV", "2 pi f hbar"),
        Step("quanta", count, "dimensionless", "energy / quantum_energy"),
        Step("sphere_volume", volume, "MeV^-3", "(4/3) pi lambda_1^3"),
    )
    return EstimateRecord(
        name="graviton_density",
        value=density,
        unit="MeV^3",
        formula="n = [L * (2 lambda_1 / c) / (2 pi f hbar)] / [(4/3) pi lambda_1^3]",
        steps=steps,
    )


def xi_figure_of_merit(
    n_mev3: float,
    ctx: NaturalUnitContext,
    t_inv_mev: float | None = None,
    frequency_hz: float | None = None,
) -> EstimateRecord:
    """Conversion figure of merit xi = 8 pi G n T; turnover needs xi >= 1.

    T defaults to the light-crossing time of the sphere diameter,
    2 lambda_1 / c, which requires ``frequency_hz``.
    """
    if n_mev3 < 0:
        raise ParameterError("density must be non-negative")
    if t_inv_mev is None:
        if frequency_hz is None:
            raise ParameterError("give either t_inv_mev or frequency_hz for the default T")
        t_inv_mev = (2.0 / frequency_hz) * ctx.inv_mev_per_second
    factors = (
        Step("eight_pi_G", ctx.eight_pi_G, "MeV^-2"),
        Step("density", n_mev3, "MeV^3"),
        Step("time", t_inv_mev, "MeV^-1", "diameter light-crossing time unless overridden"),
    )
    if sum(_mev_power(s.unit) for s in factors) != 0:
        raise ParameterError("xi factors do not cancel to a dimensionless result")
    xi = ctx.eight_pi_G * n_mev3 * t_inv_mev
    return EstimateRecord(
        name="xi",
        value=xi,
        unit="dimensionless",
        formula="xi = 8 pi G * n * T",
        steps=factors,
        flags={"turnover_capable": bool(xi >= 1.0)},
    )


def blocking_threshold(
    n_gr_mev3: float, photon_energy_mev: float, ctx: NaturalUnitContext
) -> EstimateRecord:
    """Photon density at which photon-photon refraction blocks conversion.

    Blocking sets in once 8 pi G n_gr < 0.1 alpha^2 E^2 m_e^-4 n_gamma, so
    the threshold density is n_gamma* = 8 pi G n_gr m_e^4 / (0.1 alpha^2
    E^2). If n_gamma* exceeds n_gr the conversion stalls before parity;
    otherwise the photon cloud can grow to match the graviton cloud.
    """
    if n_gr_mev3 <= 0 or photon_energy_mev <= 0:
        raise ParameterError("density and photon energy must be positive")
    numerator = ctx.eight_pi_G * n_gr_mev3 * ctx.m_e_mev**4
    denominator = 0.1 * ctx.alpha**2 * photon_energy_mev**2
    threshold = numerator / denominator
    return EstimateRecord(
        name="blocking_threshold",
        value=threshold,
        unit="MeV^3",
        formula="n_gamma* = 8 pi G n_gr m_e^4 / (0.1 alpha^2 E^2)",
        steps=(
            Step("eight_pi_G", ctx.eight_pi_G, "MeV^-2"),
            Step("graviton_density", n_gr_mev3, "MeV^3"),
            Step("electron_mass", ctx.m_e_mev, "MeV"),
            Step("alpha", ctx.alpha, "dimensionless"),
            Step("photon_energy", photon_energy_mev, "MeV"),
        ),
        flags={"parity_reachable": bool(threshold <= n_gr_mev3)},
    )


def incoherent_comparison(frequency_hz: float, ctx: NaturalUnitContext) -> EstimateRecord:
    """Ratio of incoherent to coherent conversion times, G^-1 lambda_1^2.

    The order of magnitude is computed along two independent arithmetic
    paths (direct product and a log10 sum over the conversion factors);
    their agreement is recorded in the flags.
    """
    if frequency_hz <= 0:
        raise ParameterError("frequency must be positive")
    lam1 = wavelength_mev_inv(frequency_hz, ctx)
    g = ctx.newton_g
    ratio = lam1**2 / g
    exponent = math.log10(ratio)
    # Independent path: sum the base-10 logs of every factor.
    exponent_logsum = (
        2.0 * (math.log10(ctx.c_m_per_s) - math.log10(frequency_hz) + math.log10(ctx.inv_mev_per_meter))
        + math.log10(8.0 * math.pi)
        - math.log10(ctx.eight_pi_G)
    )
    return EstimateRecord(
        name="incoherent_to_coherent_ratio",
        value=ratio,
        unit="dimensionless",
        formula="ratio = lambda_1^2 / G",
        steps=(
            Step("wavelength", lam1, "MeV^-1", "lambda_1 = c / f"),
            Step("G", g, "MeV^-2", "eight_pi_G / (8 pi)"),
        ),
        flags={
            "exponent": exponent,
            "exponent_logsum": exponent_logsum,
            "exponent_paths_agree": bool(abs(exponent - exponent_logsum) < 0.1),
        },
    )
