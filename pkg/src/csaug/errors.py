"""Exception hierarchy shared across the package.

Two top-level families mirror the CLI exit-code contract: ConfigError for
bad arguments or invalid configuration (exit 2) and DataError for broken
input files or inconsistent data (exit 3).
"""


class CsaugError(Exception):
    """Base class for all package errors."""


class ConfigError(CsaugError):
    """Invalid configuration: bad flag values, ratio out of range, unknown language."""


class DataError(CsaugError):
    """Broken input data: malformed files, schema violations, inconsistent traces."""


class MalformedLineError(DataError):
    """A dictionary line that cannot be split into a (source, translation) pair."""


class SchemaError(DataError):
    """A corpus record violating the JSONL schema; message carries the field path."""


class TraceMismatchError(DataError):
    """A replacement trace that does not match the instance it claims to describe."""


class InsufficientSamplesError(CsaugError):
    """A statistical check was requested with fewer samples than its floor."""
