"""Exception hierarchy shared by the numerical modules and the CLI."""


class DecayLawError(Exception):
    """Base class for every error raised by :mod:`decaylaw`."""


class DomainError(DecayLawError, ValueError):
    """Argument outside the domain where the quantity is defined."""


class RangeExceeded(DecayLawError, OverflowError):
    """Result is finite mathematically but not representable in double precision."""


class ConvergenceFailure(DecayLawError):
    """An iterative or adaptive procedure stopped before meeting its tolerance.

    ``value`` and ``error_estimate`` carry the best result reached so far.
    """

    def __init__(self, message, value=None, error_estimate=None, panels_used=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.panels_used = panels_used


class StepTooCoarse(DecayLawError):
    """Finite-difference error estimate is too large relative to the result."""


class InsufficientPoints(DecayLawError, ValueError):
    pass


class NonPositiveProbability(DecayLawError, ValueError):
    pass


class GridTooCoarse(DecayLawError, ValueError):
    pass


class ConfigError(DecayLawError, ValueError):
    """Malformed run configuration; ``line``/``column`` locate the problem when known."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
