"""Exception types shared across the library."""
from __future__ import annotations


class PreconditionError(ValueError):
    """Input violates a documented precondition (maps to exit code 2)."""


class ResourceCapError(RuntimeError):
    """A computation exceeded its step budget (maps to exit code 3)."""
