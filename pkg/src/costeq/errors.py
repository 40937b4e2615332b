"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``FormatError`` subclasses exit with 2,
every other ``CostEqError`` with 1.
"""

from __future__ import annotations


class CostEqError(Exception):
    """Base class for all domain errors raised by costeq."""


class ValidationError(CostEqError, ValueError):
    """Input violates a type invariant (non-finite value, bad weight, ...)."""


class DegenerateInputError(CostEqError, ValueError):
    """Input is well-formed but too small to fit (e.g. one distinct cost)."""


class PlanError(CostEqError, ValueError):
    pass


class FormatError(CostEqError):
    """Malformed serialized input: CSV, JSON, or text-to-text streams."""


class ParseError(FormatError, ValueError):
    """A parse failure pinned to a location.

    ``row`` is the 1-based CSV row (the header is row 1); ``offset`` is a byte
    offset into UTF-8 encoded text. Either may be ``None``.
    """

    def __init__(self, message: str, *, row: int | None = None, offset: int | None = None):
        self.row = row
        self.offset = offset
        where = []
        if row is not None:
            where.append(f"row {row}")
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class MissingColumnError(ParseError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing required column {column!r}", row=1)
