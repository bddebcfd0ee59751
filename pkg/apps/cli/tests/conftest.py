"""Pytest configuration for skeinlab_cli tests."""

from __future__ import annotations

import json
import os
from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import pytest

PASSING_CHECK: dict[str, Any] = {
    "check_id": "demo.pass",
    "anchor": "§0",
    "basis": [{"name": "a", "degree": 1}, {"name": "b", "degree": 1}],
    "axioms": [{"name": "ax", "lhs": "a", "rhs": "q*b", "provenance": "PAPER-figure"}],
    "claim": {"lhs": "a", "rhs": "q*b"},
}


@pytest.fixture(autouse=True)
def reset_config_for_tests(monkeypatch: pytest.MonkeyPatch) -> Generator[None, None, None]:
    """Run every test against a clean environment and a fresh config."""
    for key in list(os.environ):
        if key.startswith("SKEINLAB_"):
            monkeypatch.delenv(key)
    try:
        from skeinlab_core.config import reset_config
    except ImportError:
        yield
        return
    reset_config()
    yield
    reset_config()


@pytest.fixture
def write_manifest(tmp_path: Path) -> Callable[..., Path]:
    """Writes a manifest file into `tmp_path` and returns its path."""

    def _write(
        name: str, *checks: dict[str, Any], suite: str = "elimination"
    ) -> Path:
        path = tmp_path / f"{name}.json"
        document = {"manifest": name, "suite": suite, "checks": list(checks)}
        path.write_text(json.dumps(document, indent=2), encoding="utf-8")
        return path

    return _write


def check(**overrides: Any) -> dict[str, Any]:
    """A passing manifest check with `overrides` applied."""
    return {**PASSING_CHECK, **overrides}
