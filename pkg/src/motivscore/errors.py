"""Exception hierarchy.

Errors are split by the CLI exit code they map to: ``DataError`` (1),
``ConfigError`` (2).  I/O problems surface as the builtin ``OSError`` (3).
"""


class MotivscoreError(Exception):
    """Base class for every error raised by this package."""


class DataError(MotivscoreError):
    """Input data violates a contract."""


class ConfigError(MotivscoreError):
    """Experiment configuration is invalid."""


class MissingColumn(DataError):
    def __init__(self, name):
        super().__init__(f"missing column {name!r}")
        self.name = name


class RowParseError(DataError):
    def __init__(self, line, column, text=""):
        super().__init__(f"line {line}: cannot parse column {column!r} ({text!r})")
        self.line = line
        self.column = column


class RangeViolation(DataError):
    def __init__(self, line, column, value):
        super().__init__(f"line {line}: {column}={value!r} out of range")
        self.line = line
        self.column = column
        self.value = value


class InsufficientData(DataError):
    pass


class SingleClass(DataError):
    pass


class DegenerateSplit(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass


class EmptyInput(DataError):
    pass


class KTooLarge(DataError):
    pass


class KOutOfRange(DataError):
    pass


class DegenerateForest(DataError):
    pass


class SingularDesign(DataError):
    pass
