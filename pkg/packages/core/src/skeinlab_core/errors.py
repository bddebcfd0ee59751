"""
Error hierarchy for skeinlab.

Every error raised by the library derives from `SkeinlabError` and carries a
short machine-readable `code` plus a `details` dictionary. The verification
runner copies both into the `details` of a failing check result, so an error
raised deep inside a derivation still surfaces as a structured report entry
instead of a traceback.
"""

from __future__ import annotations

from typing import Any


class SkeinlabError(Exception):
    """Base class for all skeinlab errors."""

    code = "skeinlab_error"

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details: dict[str, Any] = details

    def as_details(self) -> dict[str, Any]:
        """Returns the error as a JSON-friendly dictionary."""
        payload: dict[str, Any] = {"error": self.code, "message": self.message}
        payload.update({k: _jsonable(v) for k, v in self.details.items()})
        return payload


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


# --- algebra-core ---


class NonExactDivision(SkeinlabError):
    """The divisor does not divide the dividend; signals a broken identity."""

    code = "non_exact_division"


class DivisionByZero(SkeinlabError):
    code = "division_by_zero"


class NonInvertibleSubstitution(SkeinlabError):
    """A negative power of a variable met a non-unit substitution value."""

    code = "non_invertible_substitution"


class ExpressionSyntaxError(SkeinlabError):
    """Malformed polynomial or formal expression text."""

    code = "expression_syntax"

    def __init__(self, message: str, position: int, text: str = "") -> None:
        super().__init__(f"{message} at position {position}", position=position, text=text)
        self.position = position


# --- formal-calculus ---


class MatrixMismatch(SkeinlabError):
    code = "matrix_mismatch"


class EliminationSingular(SkeinlabError):
    code = "elimination_singular"


class ClaimFailed(SkeinlabError):
    code = "claim_failed"


class UnderdeterminedAxioms(SkeinlabError):
    code = "underdetermined_axioms"


# --- reduction-engine ---


class NonConfluent(SkeinlabError):
    code = "non_confluent"


class UnreducibleTerm(SkeinlabError):
    """A normal form still holds a monomial outside r2^m r3^n, 0 <= m, n <= 2."""

    code = "unreducible_term"


class DerivationMismatch(SkeinlabError):
    code = "derivation_mismatch"


class ExactDivisionFailed(SkeinlabError):
    code = "exact_division_failed"


class EliminationMismatch(SkeinlabError):
    code = "elimination_mismatch"


class DimensionMismatch(SkeinlabError):
    code = "dimension_mismatch"


# --- character-verifier ---


class NonInvertibleParameter(SkeinlabError):
    code = "non_invertible_parameter"


class TraceMismatch(SkeinlabError):
    code = "trace_mismatch"


class ZeroDeterminant(SkeinlabError):
    code = "zero_determinant"


class LeadingTermCancelled(SkeinlabError):
    code = "leading_term_cancelled"


class ConditionDisagreement(SkeinlabError):
    """Matrix and scalar forms of the representation condition disagree."""

    code = "condition_disagreement"


# --- verify-cli ---


class ManifestParseError(SkeinlabError):
    code = "manifest_parse"

    def __init__(self, message: str, source: str, line: int = 0, column: int = 0) -> None:
        super().__init__(
            f"{source}:{line}:{column}: {message}", source=source, line=line, column=column
        )
        self.source = source
        self.line = line
        self.column = column


class ReportWriteError(SkeinlabError):
    code = "report_write"


class ConfigError(SkeinlabError):
    code = "config_error"
