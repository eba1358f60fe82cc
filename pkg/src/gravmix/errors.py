"""Exception types shared across the package."""


class GravmixError(Exception):
    """Base class for all gravmix errors."""


class ParameterError(GravmixError, ValueError):
    """Invalid user-supplied parameter (bad value, wrong name, wrong count)."""


class SolverError(GravmixError, RuntimeError):
    """A solver failed mid-run (non-finite state, eigensolver breakdown)."""
