"""Exception hierarchy shared by all kpsum modules.

The CLI maps these onto distinct exit codes (see ``kpsum.cli``): input
problems, backend/transport problems, and internal invariant violations
are kept apart so callers can tell whose fault a failure is.
"""
from __future__ import annotations


class KPSumError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(KPSumError):
    """A file could not be parsed (malformed row, missing column, ...)."""

    def __init__(self, message: str, path=None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += f" [{path}"
            loc += f":{line}]" if line is not None else "]"
        elif line is not None:
            loc += f" [line {line}]"
        super().__init__(message + loc)
        self.path = path
        self.line = line


class IntegrityError(KPSumError):
    """Referential integrity or uniqueness violated (duplicate/unknown id)."""


class ConfigError(KPSumError):
    """A configuration object is incomplete or contradictory."""


class FormatError(KPSumError):
    """A data file or remote response does not follow its documented schema."""


class TransportError(KPSumError):
    """A remote backend could not be reached or answered with an error."""


class PairLookupError(KPSumError):
    """A precomputed match file has no entry for a requested ordered pair."""


class MissingEmbeddingsError(KPSumError):
    """An embedding file does not cover every requested argument id."""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        shown = ", ".join(self.missing_ids[:10])
        more = "" if len(self.missing_ids) <= 10 else f" (+{len(self.missing_ids) - 10} more)"
        super().__init__(f"embedding file is missing vectors for: {shown}{more}")


class CapacityError(KPSumError):
    """A sampling request cannot be satisfied by the available data."""


class InternalError(KPSumError):
    """An internal invariant was violated; indicates a bug, not bad input."""
