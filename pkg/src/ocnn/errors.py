"""Exception hierarchy shared across the package."""


class OcnnError(Exception):
    """Base class for every error raised by :mod:`ocnn`."""


class DimensionError(OcnnError, ValueError):
    """Inputs disagree on dimensionality."""


class ParameterError(OcnnError, ValueError):
    """A numeric parameter is outside its valid range."""


class NoiseBudgetError(OcnnError):
    """The IQR fence could not reject enough target rows."""


class PlanError(OcnnError):
    """Too few rows of some class to build a cross-validation plan."""


class MetricError(OcnnError, ValueError):
    """A metric is undefined for the given counts."""


class ParseError(OcnnError, ValueError):
    """A dataset or config file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
