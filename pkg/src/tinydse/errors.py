"""Exception hierarchy shared by every module.

The CLI maps each family to its own exit status, so callers that only care
about "bad input file" vs "bad configuration" vs "cannot be built" can catch
the base class of that family.
"""

from __future__ import annotations


class TinyDSEError(Exception):
    """Base class for all package errors."""


class SpecError(TinyDSEError, ValueError):
    """A domain value (architecture, scheme, requirement) violates its invariants."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(TinyDSEError):
    """A data file could not be read; carries the offending line when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class CatalogError(ParseError):
    """A part catalog loaded but breaks a catalog invariant."""


class ConfigError(TinyDSEError):
    """Missing or inconsistent configuration (coefficients, selectors, options)."""


class InfeasibleError(TinyDSEError):
    """No hardware in the catalog satisfies a requirement."""


class EvaluationError(TinyDSEError, ValueError):
    """A metric cannot be computed from the supplied data."""
