"""Exception hierarchy for qbatt."""


class QBattError(Exception):
    """Base class for all qbatt errors."""


class NotHermitian(QBattError, ValueError):
    pass


class NoConvergence(QBattError, RuntimeError):
    pass


class SiteOutOfRange(QBattError, IndexError):
    pass


class DimensionMismatch(QBattError, ValueError):
    pass


class DimensionGuard(QBattError, ValueError):
    pass


class DegenerateSteadyState(QBattError, RuntimeError):
    pass


class NoSteadyState(QBattError, RuntimeError):
    pass


class UnsupportedN(QBattError, ValueError):
    pass


class DomainError(QBattError, ValueError):
    pass


class NotDensityMatrix(QBattError, ValueError):
    pass


class ZeroStoredEnergy(QBattError, ZeroDivisionError):
    pass


class StepTooLarge(QBattError, ValueError):
    pass


class NotConverged(QBattError, RuntimeError):
    pass


class NonPhysicalState(QBattError, RuntimeError):
    pass


class FlatObjective(QBattError, RuntimeError):
    pass


class UnknownFigure(QBattError, KeyError):
    pass


class ConfigError(QBattError, ValueError):
    """Invalid sweep configuration. ``field`` names the offending key path."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
