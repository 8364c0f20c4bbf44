"""Exception hierarchy shared by every module of the package."""


class SteklovError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SteklovError, ValueError):
    """An argument lies outside the domain of the requested function."""


class CodimensionError(DomainError):
    """The submanifold has codimension below 2."""


class InconsistencyError(SteklovError):
    """Both coefficients of a radial solution were forced to zero."""


class ModeSingularError(SteklovError, ArithmeticError):
    """R(eps) vanished to working precision, so sigma = -R'(eps)/R(eps) is undefined."""


class IntegrationError(SteklovError, ArithmeticError):
    """The oracle integrator produced a non-finite state."""


class TruncationError(SteklovError):
    """A spectrum table is not certified complete where a caller needs it."""


class FitError(SteklovError):
    """Least-squares design matrix is degenerate."""


class AuditError(SteklovError):
    """A bracketing or dual-path audit found a violation."""
