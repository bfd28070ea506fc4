"""Exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: configuration problems exit
with 1, numerical non-convergence with 2, and I/O failures with 3.
"""


class QdpliError(Exception):
    pass


class ConfigError(QdpliError):
    """Invalid scenario/configuration input. Carries the offending key."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DomainError(QdpliError, ValueError):
    """An operation was called outside its mathematical domain."""


class NumericsError(QdpliError):
    """A quadrature or iteration failed to converge. Carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularityError(NumericsError):
    """Steady-state denominator vanished; reports the offending point."""
