"""Exception hierarchy.

Each class carries the CLI exit code it maps to, so the front end can
translate failures without a lookup table.
"""


class PrebunkError(Exception):
    exit_code = 1


class ConfigError(PrebunkError, ValueError):
    """Bad arguments, inconsistent settings, violated preconditions."""

    exit_code = 2


class DataError(PrebunkError, ValueError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class ValidationError(DataError):
    """Input data violates a structural invariant (e.g. a self-loop)."""


class ResourceError(PrebunkError, RuntimeError):
    exit_code = 4


class InvariantError(PrebunkError, AssertionError):
    """An internal numerical invariant failed beyond tolerance."""
