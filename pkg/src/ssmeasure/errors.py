"""Exception hierarchy shared by every module of the package."""


class MeasureError(Exception):
    """Base class for all errors raised by ssmeasure."""


class DimensionMismatch(MeasureError):
    pass


class RatioOutOfRange(MeasureError):
    pass


class NotOrthogonal(MeasureError):
    pass


class TooFewMaps(MeasureError):
    pass


class NotSeparated(MeasureError):
    """The strong separation condition fails, or cannot be decided at the requested tolerance."""


class TolNotReached(MeasureError):
    pass


class SingularMap(MeasureError):
    pass


class CapacityExceeded(MeasureError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class PrefixTooLong(MeasureError):
    pass


class WindowInfeasible(MeasureError):
    pass


class NoAdmissible(MeasureError):
    pass


class TooLarge(MeasureError):
    pass


class UnknownFormula(MeasureError):
    pass


class ROutOfDomain(MeasureError):
    pass


class DegenerateInterval(MeasureError):
    pass


class ConfigError(MeasureError):
    """Malformed custom-IFS configuration; carries the offending line and field."""

    def __init__(self, message, line=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
