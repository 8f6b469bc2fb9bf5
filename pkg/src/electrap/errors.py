"""Exception hierarchy.

Validation problems derive from ``ValueError`` and numerical failures from
``ArithmeticError`` so the CLI can map them to distinct exit codes.
"""


class ElectrapError(Exception):
    """Base class for all package errors."""


class ValidationError(ElectrapError, ValueError):
    pass


class NumericalError(ElectrapError, ArithmeticError):
    pass


class InvalidDimension(ValidationError):
    pass


class InvalidEmbedding(ValidationError):
    pass


class InvalidComparison(ValidationError):
    pass


class UnphysicalDephasing(ValidationError):
    pass


class InvalidRegime(ValidationError):
    pass


class NotDispersive(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class UnknownScenario(ValidationError):
    pass


class IntegrationDiverged(NumericalError):
    pass


class PositivityViolation(NumericalError):
    pass


class IntegrationFailure(NumericalError):
    pass


class ModelInconsistency(NumericalError):
    pass
