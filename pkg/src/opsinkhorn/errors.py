"""Exception types shared across the package.

The CLI maps these onto distinct process exit codes, so library code should
raise the most specific type that applies.
"""


class InvalidInputError(ValueError):
    """Malformed or inconsistent input (shapes, non-Hermitian data, NaNs)."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(ValueError):
    """A matrix required to be positive definite is singular or indefinite."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget without reaching tolerance."""


class UnsupportedError(ValueError):
    """A requested combination of options is deliberately not provided."""


class ParseError(ValueError):
    """A serialized matrix file violates the expected schema."""
