"""Tests for structured logging."""

from __future__ import annotations

import json
from collections.abc import Generator

import pytest

from skeinlab_cli import SERVICE_NAME, __version__
from skeinlab_cli.logger import configure, log_event, set_level


@pytest.fixture(autouse=True)
def info_level() -> Generator[None, None, None]:
    configure("INFO", "local")
    yield
    configure("INFO", "local")


class TestLogEvent:
    """Test JSON log lines on stderr."""

    def test_standard_fields(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Each line carries the standard fields plus the caller's."""
        log_event("info", "check_finished", check_id="appB.action", status="pass")

        captured = capsys.readouterr()
        record = json.loads(captured.err)
        assert captured.out == ""
        assert record["service"] == SERVICE_NAME
        assert record["version"] == __version__
        assert record["level"] == "INFO"
        assert record["msg"] == "check_finished"
        assert record["check_id"] == "appB.action"
        assert "ts" in record

    def test_unknown_level_is_info(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Unknown levels are logged as INFO."""
        log_event("chatty", "event")
        assert json.loads(capsys.readouterr().err)["level"] == "INFO"

    def test_threshold(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Events below the configured level are dropped."""
        set_level("WARNING")
        log_event("INFO", "dropped")
        log_event("ERROR", "kept")

        lines = capsys.readouterr().err.splitlines()
        assert [json.loads(line)["msg"] for line in lines] == ["kept"]

    def test_non_json_values(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Values JSON cannot encode are logged as strings."""
        log_event("INFO", "event", path=object())
        assert json.loads(capsys.readouterr().err)["path"].startswith("<object")

    def test_configure(self, capsys: pytest.CaptureFixture[str]) -> None:
        """`configure` sets both the threshold and the env field."""
        log_event("INFO", "before")
        configure("warning", "dev")
        log_event("INFO", "dropped")
        log_event("WARNING", "after")

        records = [json.loads(line) for line in capsys.readouterr().err.splitlines()]
        assert [(r["msg"], r["env"]) for r in records] == [("before", "local"), ("after", "dev")]
