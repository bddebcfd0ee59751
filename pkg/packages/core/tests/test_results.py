"""Tests for check results and the error hierarchy."""

from __future__ import annotations

import time

import pytest
from pydantic import ValidationError

from skeinlab_core.errors import ExpressionSyntaxError, NonExactDivision, SkeinlabError
from skeinlab_core.results import CheckResult, CheckStatus, result_from_failures


class TestCheckResult:
    """Test the result model."""

    def test_frozen(self) -> None:
        """Results are immutable."""
        result = CheckResult(check_id="x", status=CheckStatus.PASS, paper_anchor="§1")
        with pytest.raises(ValidationError):
            result.status = CheckStatus.FAIL  # type: ignore[misc]

    def test_status_values(self) -> None:
        """Statuses serialize as lowercase strings; flagged still counts as ok."""
        result = CheckResult(check_id="x", status=CheckStatus.FLAGGED, paper_anchor="")
        assert result.model_dump(mode="json")["status"] == "flagged"
        assert result.ok

    def test_from_failures(self) -> None:
        """Any failure fails the check and the count is reported."""
        started = time.perf_counter()
        passed = result_from_failures("x", "§1", [], started, checked=3)
        failed = result_from_failures("x", "§1", [{"k": 1}], started)

        assert passed.status is CheckStatus.PASS
        assert passed.details["cases_checked"] == 3
        assert failed.status is CheckStatus.FAIL
        assert failed.details["failure_count"] == 1


class TestErrors:
    """Test structured error details."""

    def test_as_details(self) -> None:
        """Errors carry their code, message and extra fields."""
        exc = NonExactDivision("remainder is not zero", divisor="r - 1")
        assert exc.as_details() == {
            "error": "non_exact_division",
            "message": "remainder is not zero",
            "divisor": "r - 1",
        }
        assert isinstance(exc, SkeinlabError)

    def test_non_json_values_stringified(self) -> None:
        """Detail values that are not JSON types become strings."""
        exc = SkeinlabError("boom", items=(1, {2}), nested={"a": None})
        details = exc.as_details()
        assert details["items"] == [1, "{2}"]
        assert details["nested"] == {"a": None}

    def test_expression_error_position(self) -> None:
        """Syntax errors mention their position."""
        exc = ExpressionSyntaxError("unexpected", 7, "r + ...")
        assert exc.position == 7
        assert str(exc) == "unexpected at position 7"
