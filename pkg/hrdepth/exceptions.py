"""
Exception hierarchy for hrdepth.

Every error subclasses the builtin a caller would naturally catch, so
``except ValueError`` keeps working for bad inputs.
"""

from typing import Any, Dict, Optional


class HRDepthError(Exception):
    """Base class for all hrdepth errors."""


class DomainError(HRDepthError, ValueError):
    """An input violates a domain rule (grid mismatch, invalid subset, ...)."""


class ConfigError(HRDepthError, ValueError):
    """A run configuration is invalid."""


class NumericError(HRDepthError, ArithmeticError):
    """A numerical routine failed to converge."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"


class ResourceCapError(HRDepthError, MemoryError):
    """A configured memory or work budget would be exceeded."""
