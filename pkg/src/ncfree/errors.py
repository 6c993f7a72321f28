"""Shared exception types.

The CLI maps these onto exit codes: usage/validation problems exit with 2,
numeric or solver failures with 3.
"""


class ValidationError(ValueError):
    """Input is structurally invalid (not a partition, crossing blocks, ...)."""


class EnumerationCapError(ValueError):
    """Requested exhaustive enumeration beyond the configured cap."""


class SamplingBudgetError(RuntimeError):
    """Rejection sampling exhausted its attempt budget; retry with a larger one."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class SolverError(RuntimeError):
    """Numerical solver failed to converge; carries bracket diagnostics."""


class PrecisionError(ArithmeticError):
    """Requested accuracy is unreachable (e.g. too much undeclared tail mass)."""
