"""Exception types shared across the package.

The CLI maps these onto exit codes: DataError -> 2, ConfigError -> 3.
Contract violations (stepping a finished episode, negative areas, ...)
raise plain RuntimeError/ValueError and map to exit 4.
"""


class AntdynError(Exception):
    """Base class for package errors."""


class DataError(AntdynError):
    """Recording data is missing, unparsable, or violates an invariant."""


class ConfigError(AntdynError):
    """A configuration value or parameter set is invalid."""


class NoCandidateError(DataError):
    """No trail window satisfies the displacement criterion."""

    def __init__(self, message: str, max_displacement: float = 0.0):
        super().__init__(message)
        self.max_displacement = max_displacement
