"""Exception hierarchy shared across the package."""


class QifError(Exception):
    """Base class for all qifkit errors."""


class ValidationError(QifError):
    """An input failed probability/stochasticity validation."""


class DimensionMismatch(QifError):
    """Operands have incompatible shapes."""


class ParameterError(QifError):
    """A measure parameter (alpha, beta, f-mean, gain) is out of range."""
