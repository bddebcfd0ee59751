"""Tests for the manifests packaged with the CLI."""

from __future__ import annotations

import pytest

pytest.importorskip("pydantic_settings")

from skeinlab_cli.models import RunConfig  # noqa: E402
from skeinlab_cli.registry import load_registered_manifests  # noqa: E402
from skeinlab_core.manifest import Manifest, ManifestCheck  # noqa: E402
from skeinlab_core.results import CheckStatus  # noqa: E402


def _packaged() -> list[Manifest]:
    return load_registered_manifests(RunConfig())


def _checks() -> list[ManifestCheck]:
    return [c for m in _packaged() for c in m.checks]


class TestPackagedManifests:
    """Test that the shipped manifests are well formed."""

    def test_all_load(self) -> None:
        """Every packaged manifest parses and names a suite."""
        manifests = _packaged()
        assert sorted(m.name for m in manifests) == ["appC", "g2", "sec2"]
        assert {m.suite for m in manifests} == {"elimination", "appendixC"}

    def test_flagged_expectations_are_open_questions(self) -> None:
        """Only open questions may be expected to be flagged."""
        for c in _checks():
            if c.spec.expect == "flagged":
                assert c.spec.open_question, c.check_id

    def test_face_values_have_corrections(self) -> None:
        """Each face-value reading ships with a corrected counterpart."""
        ids = {c.check_id for c in _checks()}
        for cid in ids:
            if cid.endswith(".face-value"):
                assert cid.replace(".face-value", ".corrected") in ids, cid


@pytest.mark.slow
class TestPackagedVerdicts:
    """Test that every shipped check reaches its expected verdict."""

    @pytest.mark.parametrize("check", _checks(), ids=lambda c: c.check_id)
    def test_expected_status(self, check: ManifestCheck) -> None:
        """A check passes unless it is expected to be flagged; open questions may go either way."""
        result = check.run()

        if check.spec.open_question and check.spec.expect == "pass":
            assert result.ok, result.details
            return
        assert result.status is CheckStatus(check.spec.expect), result.details
