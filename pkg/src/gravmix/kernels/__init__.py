"""Backend selection for the hot stepping kernels.

Two interchangeable implementations exist: a Cython extension
(``gravmix._ckernels``, built at install time when a compiler is available)
and a NumPy fallback (``_python``). The active backend is chosen at import:
the compiled one when importable, else the fallback. Override with the
``GRAVMIX_BACKEND`` environment variable (``compiled`` | ``python``) or
:func:`set_backend` / :func:`use_backend`.
"""

from __future__ import annotations

import contextlib
import os

from ..errors import ParameterError
from . import _python

_KERNEL_FUNCTIONS = ("rk4_two_angles", "rk4_bloch")

_BACKENDS = {"python": _python}
try:
    from .. import _ckernels as _compiled

    if all(hasattr(_compiled, f) for f in _KERNEL_FUNCTIONS):
        _BACKENDS["compiled"] = _compiled
except ImportError:
    _compiled = None


def _initial_backend() -> str:
    env = os.environ.get("GRAVMIX_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "compiled" if "compiled" in _BACKENDS else "python"
    if env not in _BACKENDS:
        available = ", ".join(sorted(_BACKENDS))
        raise ImportError(f"GRAVMIX_BACKEND={env!r} not available (have: {available})")
    return env


_active = _initial_backend()


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    """Name of the active backend ('compiled' or 'python')."""
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ParameterError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch backend within a with-block."""
    previous = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def rk4_two_angles(theta_a, theta_b, rate_a, rate_b, dt, n_steps, sample_every=1):
    return _BACKENDS[_active].rk4_two_angles(
        theta_a, theta_b, rate_a, rate_b, dt, n_steps, sample_every
    )


def rk4_bloch(sp0, tp0, s30, t30, kernel, lam, inv_n, dt, n_steps, sample_every=1):
    return _BACKENDS[_active].rk4_bloch(
        sp0, tp0, s30, t30, kernel, lam, inv_n, dt, n_steps, sample_every
    )
