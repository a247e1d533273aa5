"""Exception types shared by the engines."""


class CavityLabError(Exception):
    """Base class for all errors raised by cavitylab."""


class DomainError(CavityLabError, ValueError):
    """Input outside the domain where a quantity is defined."""


class NumericalError(CavityLabError, ArithmeticError):
    """A numerical procedure produced a non-finite value."""


class SingularSystemError(CavityLabError, ArithmeticError):
    """The constrained steady-state system is (numerically) rank deficient."""


class TruncationError(CavityLabError):
    """Too much population sits on the highest retained Fock level."""
