"""Exception hierarchy shared across the package."""


class ProcaError(Exception):
    """Base class for all package errors."""


class DomainError(ProcaError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateMomentumError(DomainError):
    """Momentum k = 0, where the polarization and helicity bases are undefined."""


class SingularityError(DomainError):
    """Evaluation at the coincident point of a localized state."""


class InvalidParameterError(ProcaError, ValueError):
    """Metric parameters or configuration values that violate their invariants."""


class IncompatibleFieldsError(ProcaError, ValueError):
    """Two fields built on different configurations or lattices."""


class RepresentationError(ProcaError, TypeError):
    """Operation not closed on the given field representation."""


class UnsupportedError(ProcaError, NotImplementedError):
    """Requested variant has no available expression."""


class ConvergenceError(ProcaError, RuntimeError):
    """Numerical procedure failed to converge.

    Attributes
    ----------
    diagnostics : dict
        Intermediate estimates useful for debugging.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ParseError(ProcaError, ValueError):
    """Malformed field or configuration file."""
