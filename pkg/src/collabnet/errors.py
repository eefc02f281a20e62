"""Exception types shared across the toolkit.

The CLI maps these onto distinct exit codes, so library code should raise the
most specific class that applies.
"""


class CollabnetError(Exception):
    """Base class for toolkit errors."""


class ConfigError(CollabnetError, ValueError):
    """Invalid run configuration or command-line arguments."""


class SchemaError(CollabnetError, ValueError):
    """A mapped column is missing from an input file header."""


class AnalysisError(CollabnetError, ValueError):
    """A metric or algorithm cannot be evaluated on the given input."""


class UndefinedMetricError(AnalysisError):
    pass


class NotConnectedError(AnalysisError):
    pass


class FitError(AnalysisError):
    pass
