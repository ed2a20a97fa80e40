"""Exception hierarchy shared by every module."""


class CardcompError(Exception):
    """Base class for all package errors."""


class BadParam(CardcompError, ValueError):
    pass


class EmptyRange(BadParam):
    pass


class ZeroMass(CardcompError):
    """Conditioning on an event that has probability zero."""


class BudgetExceeded(CardcompError):
    """An exact enumeration would exceed the configured outcome budget."""


class IndexOutOfRange(BadParam, IndexError):
    pass


class SizeMismatch(BadParam):
    pass


class TooFewFaces(BadParam):
    pass


class BadLevel(BadParam):
    pass


class BadLength(BadParam):
    pass


class NonUniqueStationary(CardcompError):
    """The chain's stationary solution space is not one-dimensional."""


class Overflow(CardcompError, OverflowError):
    pass


class ConfigError(CardcompError):
    pass
