"""Exception types raised across the package."""


class DomainError(ValueError):
    """An input lies outside the domain an operation is defined on."""


class SolverDivergenceError(RuntimeError):
    """A time integrator left the physical state space."""


class InconsistencyError(RuntimeError):
    """Energy bookkeeping failed an internal consistency check."""


class TruncationError(RuntimeError):
    """Fock-space truncation was too tight for the requested accuracy."""


class NumericalError(RuntimeError):
    """A conserved quantity drifted beyond tolerance."""


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
