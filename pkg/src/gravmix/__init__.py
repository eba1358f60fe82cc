"""Coherent flavor conversion dynamics of clashing massless-particle clouds."""

from .core import (
    LawCoefficient,
    ScalingFit,
    TimeGrid,
    Trajectory,
    first_zero_crossing,
    fit_log_law,
    fit_log_scaling,
    integrate,
)
from .errors import GravmixError, ParameterError, SolverError

__version__ = "0.1.0"

__all__ = [
    "GravmixError",
    "LawCoefficient",
    "ParameterError",
    "ScalingFit",
    "SolverError",
    "TimeGrid",
    "Trajectory",
    "__version__",
    "first_zero_crossing",
    "fit_log_law",
    "fit_log_scaling",
    "integrate",
]


def __getattr__(name):
    # Lazy submodule access (gravmix.quantum etc.) without import cycles.
    import importlib

    if name in ("astro", "cli", "core", "errors", "kernels", "meanfield", "quantum", "seeded", "stability"):
        return importlib.import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
