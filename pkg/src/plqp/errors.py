"""Exception types shared across the package."""


class PlqpError(ValueError):
    """Base class for all errors raised by this package."""


class InputError(PlqpError):
    """Malformed or inconsistent input data (bad grids, weights, files)."""


class InfeasibleError(PlqpError):
    """A solver could not satisfy its constraints (mass mismatch, no flow)."""
