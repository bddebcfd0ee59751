"""Tests for manifest parsing and execution."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import pytest

from skeinlab_core.errors import ManifestParseError
from skeinlab_core.manifest import (
    load_manifest,
    load_manifests,
    manifest_paths,
    parse_manifest,
)
from skeinlab_core.results import CheckStatus


def _check(**overrides: Any) -> dict[str, Any]:
    check: dict[str, Any] = {
        "check_id": "demo.direct",
        "anchor": "§0",
        "basis": [{"name": "a", "degree": 1}, {"name": "b", "degree": 1}],
        "axioms": [{"name": "ax", "lhs": "a", "rhs": "q*b", "provenance": "PAPER-figure"}],
        "claim": {"lhs": "a", "rhs": "q*b"},
    }
    check.update(overrides)
    return check


def _document(*checks: dict[str, Any]) -> str:
    document = {"manifest": "demo", "suite": "elimination", "checks": list(checks)}
    return json.dumps(document, indent=2)


class TestParsing:
    """Test validation and located errors."""

    def test_valid_manifest(self) -> None:
        """A minimal manifest builds one instance per check."""
        manifest = parse_manifest(_document(_check()), "demo.json")

        assert manifest.name == "demo"
        assert manifest.suite == "elimination"
        assert [c.check_id for c in manifest.checks] == ["demo.direct"]
        assert len(manifest.checks[0].instances) == 1

    def test_json_syntax_error(self) -> None:
        """Broken JSON reports the decoder's line and column."""
        with pytest.raises(ManifestParseError) as exc_info:
            parse_manifest('{\n  "manifest": "demo",\n  "suite": }', "bad.json")

        assert exc_info.value.line == 3
        assert exc_info.value.column > 0
        assert str(exc_info.value).startswith("bad.json:3:")

    def test_schema_error_located(self) -> None:
        """An unknown provenance tag points at the provenance key."""
        axioms = [{"name": "ax", "lhs": "a", "rhs": "b", "provenance": "folklore"}]
        text = _document(_check(axioms=axioms))

        with pytest.raises(ManifestParseError) as exc_info:
            parse_manifest(text)

        expected_line = text.splitlines().index(
            next(line for line in text.splitlines() if '"provenance"' in line)
        ) + 1
        assert exc_info.value.line == expected_line
        assert "provenance" in exc_info.value.message

    def test_derived_provenance_rejected(self) -> None:
        """Manifest axioms cannot claim to be derived."""
        axioms = [{"name": "ax", "lhs": "a", "rhs": "b", "provenance": "derived"}]

        with pytest.raises(ManifestParseError, match="cite the figure or text"):
            parse_manifest(_document(_check(axioms=axioms)))

    def test_unknown_field(self) -> None:
        """Extra keys are rejected."""
        with pytest.raises(ManifestParseError):
            parse_manifest(_document(_check(comment="nope")))

    def test_expression_error_located(self) -> None:
        """A malformed expression is reported at its line with the offset added."""
        text = _document(_check(claim={"lhs": "a + $", "rhs": "0"}))

        with pytest.raises(ManifestParseError) as exc_info:
            parse_manifest(text)

        line = next(i for i, s in enumerate(text.splitlines(), 1) if "a + $" in s)
        column = text.splitlines()[line - 1].index("a + $") + 1
        assert exc_info.value.line == line
        assert exc_info.value.column == column + 4

    def test_undeclared_symbol(self) -> None:
        """Symbols must be declared in the basis."""
        with pytest.raises(ManifestParseError, match="unknown name 'c'"):
            parse_manifest(_document(_check(claim={"lhs": "c", "rhs": "0"})))

    def test_duplicate_check_ids(self) -> None:
        """Check ids are unique within a manifest."""
        with pytest.raises(ManifestParseError, match="duplicate check id"):
            parse_manifest(_document(_check(), _check()))

    def test_unknown_relabel_source(self) -> None:
        """A relabeled axiom must name an existing axiom."""
        relabel = [{"name": "ax2", "axiom": "missing", "permutation": {"1": 2, "2": 1}}]
        with pytest.raises(ManifestParseError, match="unknown axiom"):
            parse_manifest(_document(_check(relabel=relabel)))

    def test_relabel_must_permute(self) -> None:
        """A relabeling that is not a permutation fails validation."""
        relabel = [{"name": "ax2", "axiom": "ax", "permutation": {"1": 2, "2": 3}}]
        with pytest.raises(ManifestParseError, match="permute"):
            parse_manifest(_document(_check(relabel=relabel)))

    def test_negative_multiplier(self) -> None:
        """Multiplier exponents are non-negative."""
        axioms = [
            {"name": "ax", "lhs": "a", "provenance": "PAPER-text", "multipliers": {"t": -1}}
        ]
        with pytest.raises(ManifestParseError):
            parse_manifest(_document(_check(axioms=axioms)))


class TestRunning:
    """Test routing and parameter grids."""

    def test_identity_check(self) -> None:
        """A plain claim runs through the identity-modulo decision."""
        check = parse_manifest(_document(_check())).checks[0]
        result = check.run()

        assert result.status is CheckStatus.PASS
        assert result.paper_anchor == "§0"
        assert result.details["combination"] == {"ax": "1"}

    def test_failing_claim(self) -> None:
        """A claim the axioms do not imply fails with a residual."""
        check = parse_manifest(_document(_check(claim={"lhs": "a", "rhs": "b"}))).checks[0]
        result = check.run()

        assert result.status is CheckStatus.FAIL
        assert result.details["residual"]

    def test_open_question(self) -> None:
        """A failing open question is flagged."""
        spec = _check(claim={"lhs": "a", "rhs": "b"}, open_question=True, expect="flagged")
        result = parse_manifest(_document(spec)).checks[0].run()

        assert result.status is CheckStatus.FLAGGED

    def test_elimination_route(self) -> None:
        """Checks with `eliminate` run through elimination."""
        spec = _check(
            basis=[
                {"name": "a", "degree": 1},
                {"name": "b", "degree": 1},
                {"name": "x", "degree": 1},
            ],
            axioms=[
                {"name": "ax1", "lhs": "a", "rhs": "q*x", "provenance": "PAPER-figure"},
                {"name": "ax2", "lhs": "x", "rhs": "b", "provenance": "PAPER-text"},
            ],
            eliminate=["x"],
        )
        result = parse_manifest(_document(spec)).checks[0].run()

        assert result.status is CheckStatus.PASS
        assert result.details["eliminated"] == ["x"]

    def test_failed_elimination_is_a_fail_result(self) -> None:
        """Errors raised by a check become fail results, not exceptions."""
        spec = _check(
            basis=[{"name": "a", "degree": 1}, {"name": "x", "degree": 1}],
            axioms=[{"name": "ax", "lhs": "a", "provenance": "PAPER-text"}],
            claim={"lhs": "a", "rhs": "0"},
            eliminate=["x"],
        )
        result = parse_manifest(_document(spec)).checks[0].run()

        assert result.status is CheckStatus.FAIL
        assert result.details["error"] == "elimination_singular"

    def test_parameter_grid(self) -> None:
        """Every grid point must hold; instances are reported."""
        spec = _check(
            axioms=[
                {
                    "name": "ax",
                    "lhs": "a",
                    "rhs": "q*b",
                    "provenance": "PAPER-figure",
                    "multipliers": {"r": 2},
                }
            ],
            claim={"lhs": "r^n*a", "rhs": "q*r^n*b"},
            params={"n": [0, 1, 2]},
        )
        check = parse_manifest(_document(spec)).checks[0]
        result = check.run()

        assert len(check.instances) == 3
        assert result.status is CheckStatus.PASS
        assert [inst["params"] for inst in result.details["instances"]] == [
            {"n": 0},
            {"n": 1},
            {"n": 2},
        ]

    def test_grid_worst_status_wins(self) -> None:
        """One failing grid point fails the check."""
        spec = _check(
            axioms=[
                {
                    "name": "ax",
                    "lhs": "a",
                    "rhs": "q*b",
                    "provenance": "PAPER-figure",
                    "multipliers": {"r": 1},
                }
            ],
            claim={"lhs": "r^n*a", "rhs": "q*r^n*b"},
            params={"n": [0, 2]},
        )
        result = parse_manifest(_document(spec)).checks[0].run()

        assert result.status is CheckStatus.FAIL
        assert [inst["status"] for inst in result.details["instances"]] == ["pass", "fail"]


class TestLoading:
    """Test loading manifests from disk."""

    def test_load_and_collide(self, tmp_path: Path) -> None:
        """Ids must be unique across files."""
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        first.write_text(_document(_check()), encoding="utf-8")
        second.write_text(_document(_check()), encoding="utf-8")

        assert load_manifest(first).source == str(first)
        assert manifest_paths(tmp_path) == [first, second]
        with pytest.raises(ManifestParseError, match="already defined"):
            load_manifests([first, second])

    def test_missing_directory(self, tmp_path: Path) -> None:
        """A missing manifest directory is a parse error."""
        with pytest.raises(ManifestParseError, match="does not exist"):
            manifest_paths(tmp_path / "missing")

    def test_unreadable_file(self, tmp_path: Path) -> None:
        """A missing file is reported with its path."""
        with pytest.raises(ManifestParseError) as exc_info:
            load_manifest(tmp_path / "none.json")

        assert exc_info.value.source == str(tmp_path / "none.json")
