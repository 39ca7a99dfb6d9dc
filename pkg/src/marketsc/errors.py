"""Exception hierarchy.

Input problems (bad files, bad configs, invalid arguments) derive from
``InputError`` so the command line can map them to exit code 2.
"""


class MarketError(Exception):
    """Base class for all package errors."""


class InputError(MarketError, ValueError):
    """Invalid user-supplied input."""


class DimensionMismatchError(InputError):
    pass


class DegenerateClassifierError(InputError):
    """Raised when a classifier with ``w == 0`` is asked for demand or prices."""


class InfeasibleResponseError(MarketError):
    """No feature with positive weight exists, so no bundle can flip the prediction."""


class UndefinedInequalityError(InputError):
    pass


class EmptyProfileError(MarketError):
    pass


class SchemaError(InputError):
    """A dataset or config file does not have the expected columns / keys."""


class RowError(InputError):
    """A single dataset row failed to parse or violates a record invariant."""

    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


class ParseError(RowError):
    pass


class RecordInvariantError(RowError):
    pass


class ConfigError(InputError):
    pass
