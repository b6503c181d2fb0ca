"""Exception types shared across the package.

The CLI maps these onto process exit codes: data problems exit with 3,
numeric-domain problems with 4 (usage errors exit with 2 via argparse).
"""


class ResidualDepError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(ResidualDepError, ValueError):
    """A parameter lies outside its admissible range (e.g. copula theta)."""


class DataError(ResidualDepError, ValueError):
    """Input data cannot be used: parse failures, insufficient rows, ..."""


class TieError(DataError):
    """Tied values encountered under the strict tie policy."""


class NumericDomainError(ResidualDepError, ValueError):
    """An operation was evaluated outside its numeric domain."""


class VarianceDomainError(NumericDomainError):
    """a * eta >= 1/2: the asymptotic variance (and hence the CI) is undefined."""


class ConstraintError(NumericDomainError):
    """A structural constraint between tuning parameters is violated."""


class EstimationError(ResidualDepError, RuntimeError):
    """An estimation procedure failed on the given data (degenerate tail, ...)."""
