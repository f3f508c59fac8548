"""Exception hierarchy shared by all modules."""


class FractalTransportError(Exception):
    """Base class for errors raised by this package."""


class BoundsError(FractalTransportError, ValueError):
    """An integer argument (generation, side length, region) is out of range."""


class DomainError(FractalTransportError, ValueError):
    """Input is outside the domain of an operation (too few points, empty sets, ...)."""


class NumericalError(FractalTransportError, ArithmeticError):
    """A numerical invariant was violated beyond its tolerance."""


class ConvergenceError(NumericalError):
    """The eigensolver returned eigenpairs with an unacceptable residual.

    Attributes
    ----------
    worst_residual : float
        Largest ``||H v - w v||`` over all returned eigenpairs.
    """

    def __init__(self, message, worst_residual):
        super().__init__(message)
        self.worst_residual = worst_residual


class ConfigError(FractalTransportError, ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class ResourceGuardError(FractalTransportError):
    """A requested lattice exceeds the dense-diagonalization size guard."""
