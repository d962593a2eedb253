"""Exception types shared across the package."""

from __future__ import annotations


class OdecertError(Exception):
    """Base class for all errors raised by this package."""


class InputError(OdecertError):
    """Malformed or unsupported input (syntax errors, undeclared variables,
    quantified formulas where quantifier-free ones are required, ...).

    Carries optional line/column information for parser errors.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class NonPolynomialError(InputError):
    """Operation would leave the polynomial ring (negative powers, division
    by a non-constant)."""


class DimensionError(InputError):
    """Matrix/vector dimensions do not match."""


class ResourceError(OdecertError):
    """A configured step budget, cap, or limit was exhausted.

    Never a verdict: callers must surface this as a resource failure
    (CLI exit code 4), not as Invariant/NotInvariant.  ``partial`` holds
    whatever partial object was computed (e.g. the Lie-derivative chain
    built so far when a rank cap is exceeded).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
