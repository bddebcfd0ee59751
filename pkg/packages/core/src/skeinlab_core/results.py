"""
Check results shared by every verification operation.

A check never raises for a mathematical failure; it returns a `CheckResult`
whose `details` carry residuals, units, cofactors and the axioms consumed. The
shape is a status, a timing in milliseconds and a free-form, JSON-serializable
payload.
"""

from __future__ import annotations

import time
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    # reserved for discrepancies that sit in the source material itself
    FLAGGED = "flagged"


class CheckResult(BaseModel):
    """Outcome of one registered verification."""

    model_config = ConfigDict(frozen=True)

    check_id: str
    status: CheckStatus
    paper_anchor: str
    details: dict[str, Any] = Field(default_factory=dict)
    runtime_ms: int = 0

    @property
    def ok(self) -> bool:
        return self.status is not CheckStatus.FAIL


def elapsed_ms(started: float) -> int:
    """Milliseconds since a `time.perf_counter()` reading."""
    return int((time.perf_counter() - started) * 1000)


def result_from_failures(
    check_id: str,
    anchor: str,
    failures: list[dict[str, Any]],
    started: float,
    *,
    checked: int | None = None,
    details: dict[str, Any] | None = None,
) -> CheckResult:
    """Builds a pass/fail result from a list of per-case failures."""
    payload: dict[str, Any] = dict(details or {})
    if checked is not None:
        payload["cases_checked"] = checked
    if failures:
        payload["failures"] = failures[:20]
        payload["failure_count"] = len(failures)
    return CheckResult(
        check_id=check_id,
        status=CheckStatus.FAIL if failures else CheckStatus.PASS,
        paper_anchor=anchor,
        details=payload,
        runtime_ms=elapsed_ms(started),
    )
