"""Exception types shared across the package."""


class IrsbeamError(Exception):
    """Base class for all package errors."""


class SingularMatrix(IrsbeamError):
    """Matrix is numerically singular (or not positive definite where required)."""


class NoConvergence(IrsbeamError):
    """Iterative solver exceeded its iteration cap."""


class UnknownOrder(IrsbeamError):
    """No implemented Hadamard construction produces the requested order."""


class IndivisibleGrouping(IrsbeamError):
    """Number of sub-surfaces does not divide the number of reflecting elements."""


class Intractable(IrsbeamError):
    """Exhaustive search would exceed the tractability guard."""


class InvalidFrame(IrsbeamError):
    """Frame length leaves no symbols for data transmission."""


class ConfigError(IrsbeamError):
    """Experiment configuration failed validation."""
