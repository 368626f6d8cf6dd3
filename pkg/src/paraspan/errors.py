"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ValidationError -> 1,
FormatError (and plain OSError) -> 2, MissingInputError -> 3.
"""


class ParaspanError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ParaspanError):
    """A value violates a documented invariant (bad data, not bad syntax)."""


class FormatError(ParaspanError):
    """Input could not be parsed (malformed JSON line, bad tree string, ...)."""


class MissingInputError(ParaspanError):
    """A required external input (file, record entry) is absent."""
