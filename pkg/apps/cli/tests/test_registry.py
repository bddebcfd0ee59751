"""Tests for the check registry."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import pytest

pytest.importorskip("pydantic_settings")

from skeinlab_cli.models import SUITES, RunConfig  # noqa: E402
from skeinlab_cli.registry import (  # noqa: E402
    build_registry,
    builtin_tasks,
    default_manifest_dir,
    load_registered_manifests,
)
from skeinlab_core.errors import ConfigError, ManifestParseError  # noqa: E402
from skeinlab_core.hashing import manifest_hash  # noqa: E402

from .conftest import check  # noqa: E402


class TestBuiltinTasks:
    """Test built-in task declarations."""

    def test_suite_filter(self) -> None:
        """Only tasks of the selected suites are returned."""
        tasks = builtin_tasks(RunConfig(suites=("reduction",)))
        assert {t.suite for t in tasks} == {"reduction"}

    def test_character_task_per_n(self) -> None:
        """One character task per n; only n = 1 carries the phi identities."""
        tasks = {t.name: t for t in builtin_tasks(RunConfig(n_values=(1, 3)))}

        n1 = [cid for cid, _ in tasks["character-n1"].checks]
        n3 = [cid for cid, _ in tasks["character-n3"].checks]
        assert "appA.phi-identities.n1" in n1
        assert not any("phi-identities" in cid for cid in n3)
        assert "character-n5" not in tasks

    def test_case_anchors(self) -> None:
        """Case derivations are anchored by their case number."""
        task = next(t for t in builtin_tasks(RunConfig()) if t.name == "case-derivations")
        anchors = dict(task.checks)

        assert anchors["sec53.case.0.0"].endswith("Case 1")
        assert anchors["sec53.case.2.2"].endswith("Case 9")


class TestRegistry:
    """Test registry assembly and listing."""

    def test_packaged_listing(self) -> None:
        """The packaged manifests and built-ins list sorted by check id."""
        registry = build_registry(RunConfig())
        ids = registry.check_ids()

        assert ids == sorted(ids)
        assert len(ids) == len(set(ids))
        for expected in (
            "appB.relation-lambda",
            "sec53.case.2.2",
            "appA.det.n1",
            "sec22.rotation",
            "appC.L1-1",
            "g2.final-1",
        ):
            assert expected in ids

    def test_packaged_manifest_dir(self) -> None:
        """The packaged manifests ship with the CLI."""
        names = sorted(p.name for p in default_manifest_dir().glob("*.json"))
        assert names == ["appC.json", "g2.json", "sec2.json"]

    def test_manifest_suite_filter(self) -> None:
        """Manifest checks follow their manifest's suite."""
        ids = build_registry(RunConfig(suites=("elimination",))).check_ids()
        assert "sec22.rotation" in ids
        assert not any(cid.startswith(("appC.", "appB.")) for cid in ids)

    def test_empty_manifest_dir(self, tmp_path: Path) -> None:
        """Without manifests only built-in checks are listed."""
        registry = build_registry(RunConfig(manifest_dir=tmp_path))

        assert registry.manifests == []
        assert registry.manifest_hash == manifest_hash([])
        assert "sec22.rotation" not in registry.check_ids()
        assert "appB.relation-lambda" in registry.check_ids()

    def test_custom_manifest(
        self, tmp_path: Path, write_manifest: Callable[..., Path]
    ) -> None:
        """Checks from a custom directory are registered."""
        write_manifest("demo", check())
        registry = build_registry(RunConfig(suites=("elimination",), manifest_dir=tmp_path))

        assert registry.list_checks() == [("demo.pass", "§0")]

    def test_hash_tracks_content(
        self, tmp_path: Path, write_manifest: Callable[..., Path]
    ) -> None:
        """Editing a manifest changes the manifest hash."""
        config = RunConfig(manifest_dir=tmp_path)
        write_manifest("demo", check())
        before = build_registry(config).manifest_hash
        write_manifest("demo", check(anchor="§1"))

        assert build_registry(config).manifest_hash != before

    def test_collision_with_builtin(
        self, tmp_path: Path, write_manifest: Callable[..., Path]
    ) -> None:
        """A manifest check may not reuse a built-in id."""
        write_manifest("demo", check(check_id="appB.relation-lambda"))
        with pytest.raises(ConfigError, match="collides"):
            build_registry(RunConfig(manifest_dir=tmp_path))

    def test_collision_outside_selected_suites(
        self, tmp_path: Path, write_manifest: Callable[..., Path]
    ) -> None:
        """Collisions are found even when the built-in's suite is not selected."""
        write_manifest("demo", check(check_id="sec54.quotient-basis"))
        with pytest.raises(ConfigError):
            build_registry(RunConfig(suites=("elimination",), manifest_dir=tmp_path))

    def test_unknown_suite(
        self, tmp_path: Path, write_manifest: Callable[..., Path]
    ) -> None:
        """A manifest must name a known suite."""
        write_manifest("demo", check(), suite="topology")
        with pytest.raises(ManifestParseError, match="unknown suite"):
            load_registered_manifests(RunConfig(manifest_dir=tmp_path))

    def test_missing_directory(self, tmp_path: Path) -> None:
        """A manifest directory that does not exist is a parse error."""
        with pytest.raises(ManifestParseError):
            build_registry(RunConfig(manifest_dir=tmp_path / "missing"))

    def test_all_suites_have_checks(self) -> None:
        """Every suite registers at least one check."""
        registry = build_registry(RunConfig())
        assert {t.suite for t in registry.tasks} == set(SUITES)
