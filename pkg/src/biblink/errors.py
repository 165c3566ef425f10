# src/biblink/errors.py

"""Exception hierarchy shared by ingestion, configuration, and the CLI.

Problems *inside* well-formed data (duplicate ids, dangling references, ...)
are reported as `model.ValidationIssue` values, never raised. The classes here
cover conditions that stop a run; `cli` maps each one to an exit code.
"""

from __future__ import annotations


class BiblinkError(Exception):
    """Base class for every error raised on purpose by biblink."""


class InputError(BiblinkError, OSError):
    """An input file cannot be read or an output directory cannot be written."""


class SchemaVersionError(BiblinkError, ValueError):
    """An NDJSON line declares a schema version this release cannot read."""


class MalformedInputError(BiblinkError, ValueError):
    """Too many NDJSON lines failed to parse.

    Attributes:
        errors: the collected `io_ndjson.LineError` entries.
        fraction: malformed lines / total lines.
    """

    def __init__(self, message: str, errors: list, fraction: float) -> None:
        super().__init__(message)
        self.errors = errors
        self.fraction = fraction


class ConfigError(BiblinkError, ValueError):
    """A run setting is outside its documented range."""


class ValidationFailed(BiblinkError):
    """`validate --strict` found at least one issue."""


class HarvestError(BiblinkError):
    """The Crossref API kept failing after all retries."""
