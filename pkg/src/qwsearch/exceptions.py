"""Exception hierarchy for qwsearch."""


class QWSearchError(Exception):
    """Base class for every error raised by this package."""


class InvalidMarkedSet(QWSearchError, ValueError):
    pass


class UnsupportedDimension(QWSearchError, ValueError):
    pass


class NotUnitary(QWSearchError, ValueError):
    pass


class PoleAtEigenphase(QWSearchError, ArithmeticError):
    pass


class NoRootInInterval(QWSearchError):
    """No eigenphase of the searched operator lies strictly below the
    smallest positive phase of the walk (exceptional configuration)."""


class NullSpaceDimensionTooHigh(QWSearchError):
    pass


class WrongCardinality(QWSearchError, ValueError):
    pass


class DimensionTooLarge(QWSearchError, ValueError):
    pass


class AllPhasesZero(QWSearchError):
    pass


class OddSideForAntipodal(QWSearchError, ValueError):
    pass


class ZeroVector(QWSearchError, ValueError):
    pass


class InsufficientData(QWSearchError, ValueError):
    pass


class ConfigError(QWSearchError, ValueError):
    pass
