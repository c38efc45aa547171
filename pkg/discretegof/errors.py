"""Exception types shared by the library and the command line."""

USAGE_EXIT = 2
NUMERICAL_EXIT = 3


class GofError(Exception):
    """Base class for all discretegof errors."""
    exit_code = USAGE_EXIT


class InvalidArgument(GofError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedModel(GofError):
    """The model cannot be used for the requested operation."""


class UnsupportedStatistic(GofError):
    """The statistic is not available on this code path."""


class DataFormatError(GofError):
    """A data file is malformed; carries the file and line (or byte offset)."""

    def __init__(self, message, source=None, line=None, offset=None):
        self.source = source
        self.line = line
        self.offset = offset
        where = ""
        if source is not None:
            where = f"{source}"
            if line is not None:
                where += f":{line}"
            elif offset is not None:
                where += f" (byte offset {offset})"
            where += ": "
        super().__init__(f"{where}{message}")


class NumericalFailure(GofError):
    """A computation produced a non-finite or otherwise unusable number."""
    exit_code = NUMERICAL_EXIT
