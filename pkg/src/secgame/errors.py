"""Exception types, mapped to the CLI exit-code contract.

InputError -> exit 2, ConvergenceError -> exit 3, ConsistencyError -> exit 4.
"""


class InputError(ValueError):
    """Invalid argument, domain violation, or bad configuration."""


class UnsupportedOperationError(TypeError):
    """Operation not defined for this model variant."""


class ConvergenceError(RuntimeError):
    """A numerical routine failed to converge.

    Carries the best iterate and its residual so callers can inspect
    how close the routine got.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a welfare-theorem breach)."""
