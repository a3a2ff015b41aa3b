"""Exception hierarchy shared by every walkforge module."""


class WalkforgeError(Exception):
    """Base class for all errors raised by walkforge."""


class NotHermitian(WalkforgeError, ValueError):
    pass


class NotUnitary(WalkforgeError, ValueError):
    pass


class NonConvergence(WalkforgeError, ArithmeticError):
    pass


class DimensionMismatch(WalkforgeError, ValueError):
    pass


class LengthMismatch(DimensionMismatch):
    pass


class DimensionTooLarge(WalkforgeError, ValueError):
    pass


class TooManyQubits(DimensionTooLarge):
    pass


class NotNormalized(WalkforgeError, ValueError):
    pass


class AllWeightDiscarded(WalkforgeError, ValueError):
    pass


class ZeroTime(WalkforgeError, ValueError):
    pass


class ParseError(WalkforgeError, ValueError):
    """Malformed graph or circuit file.

    ``line`` is 1-based when known, ``field`` names the offending entry.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
