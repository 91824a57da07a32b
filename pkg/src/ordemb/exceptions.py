"""Exception types shared across the package.

Argument-level misuse (bad shapes, out-of-range indices, invalid options)
raises plain ``ValueError``; the classes below mark failures that the CLI
maps to distinct exit codes.
"""


class DataError(Exception):
    """A file or dataset could not be parsed or is internally inconsistent."""


class NumericError(Exception):
    """A numeric computation produced a non-finite or invalid result."""
