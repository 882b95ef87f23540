"""
Exception hierarchy for pydaar.

Every failure a caller may want to handle has its own class. All of them
derive from ValueError so existing ``except ValueError`` handlers keep
working; ``error_code`` is the machine-readable name used in CLI error JSON.
"""


class PydaarError(ValueError):
    """Base class for all pydaar errors."""

    error_code = "PydaarError"


class RankDeficientControls(PydaarError):
    """Control matrix W does not have full column rank."""

    error_code = "RankDeficientControls"


class ZeroMatrix(PydaarError):
    """Instrument matrix is identically zero."""

    error_code = "ZeroMatrix"


class NegativeTheta(PydaarError):
    """Ridge penalty below zero."""

    error_code = "NegativeTheta"


class DegenerateInstruments(PydaarError):
    """No ridge penalty satisfies both leverage constraints."""

    error_code = "DegenerateInstruments"


class ZeroKLambda(PydaarError):
    """Off-diagonal mass K_theta is zero, the statistic is undefined."""

    error_code = "ZeroKLambda"


class SingularGram(PydaarError):
    """Z'Z is not invertible where an unregularized projection is required."""

    error_code = "SingularGram"


class SingularOmega(PydaarError):
    """Heteroskedasticity-robust moment covariance is not invertible."""

    error_code = "SingularOmega"


class DegenerateColumn(PydaarError):
    """Every instrument column has a zero sup-score denominator."""

    error_code = "DegenerateColumn"


class DegenerateDenominator(PydaarError):
    """Residual mass outside the regularized projection is zero."""

    error_code = "DegenerateDenominator"


class InvalidSparsity(PydaarError):
    """First-stage sparsity pattern incompatible with K."""

    error_code = "InvalidSparsity"


class UnsupportedK(PydaarError):
    """Number of instruments not defined for the requested design."""

    error_code = "UnsupportedK"


class ZeroColumn(PydaarError):
    """Instrument column with zero sum of squares cannot be standardized."""

    error_code = "ZeroColumn"


class CsvParseError(PydaarError):
    """A data file field could not be parsed as a number."""

    error_code = "ParseError"


class MissingColumn(PydaarError):
    """A column named in the role assignment is absent from the file."""

    error_code = "MissingColumn"


class NonFinite(PydaarError):
    """A data file contains NaN or infinite values."""

    error_code = "NonFinite"


class ConfigError(PydaarError):
    """Configuration file or option values are invalid."""

    error_code = "ConfigError"
