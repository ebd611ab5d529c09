"""Exception hierarchy shared by the library and the CLI exit-code mapping."""

from __future__ import annotations


class ProdnormError(Exception):
    """Base class for all prodnorm errors."""


class DimensionError(ProdnormError, ValueError):
    """Shapes or factorizations do not fit together."""


class InputError(ProdnormError, ValueError):
    """Malformed input: non-finite entries, bad indices, unreadable files."""


class InvalidSpecError(ProdnormError, ValueError):
    """A verifier spec, strategy or game violates its invariants."""


class ResourceError(ProdnormError):
    """A computation would exceed the configured desk-scale limits."""


class ReproFailure(ProdnormError):
    """One or more reproduction checks did not hold."""
