"""Exception types shared across the toolkit.

ValidationError and its subclasses cover bad inputs (malformed files,
violated preconditions, inconsistent layers); the CLI maps them to exit
code 1.  Anything else escaping a subcommand is an internal error and
maps to exit code 2.
"""


class LscdError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(LscdError):
    """Invalid input data or arguments (CLI exit code 1)."""


class FormatError(ValidationError):
    """Malformed file content.  Carries path and 1-based line number when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where = f" [{where}]"
        super().__init__(f"{message}{where}")


class IntegrityError(ValidationError):
    """Cross-layer or cross-file inconsistency (e.g. token count mismatch)."""


class MissingValueError(ValidationError):
    """A required value or file is absent."""


class UndefinedStatisticError(LscdError):
    """A statistic has no defined value on the given input.

    Raised rather than silently returning 0; aggregation layers catch it
    and record an explicit missing value.
    """
