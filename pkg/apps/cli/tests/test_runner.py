"""Tests for suite orchestration."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path

import pytest

pytest.importorskip("pydantic_settings")

from skeinlab_cli.models import RunConfig  # noqa: E402
from skeinlab_cli.registry import CheckTask, TaskContext, build_registry  # noqa: E402
from skeinlab_cli.runner import execute_task, run_registry, run_suite, write_trace  # noqa: E402
from skeinlab_core.errors import ClaimFailed, ReportWriteError  # noqa: E402
from skeinlab_core.results import CheckResult, CheckStatus  # noqa: E402

from .conftest import check  # noqa: E402

DECLARED = (("x.1", "§1"), ("x.2", "§2"))


def _crash(ctx: TaskContext) -> list[CheckResult]:
    raise ZeroDivisionError("division by zero")


def _claim_failed(ctx: TaskContext) -> list[CheckResult]:
    raise ClaimFailed("no combination", residual=["(1)*b"])


class TestExecuteTask:
    """Test single-task execution."""

    def test_crash_fails_declared_checks(self) -> None:
        """A raising task reports fail for every declared check."""
        task = CheckTask("boom", "families", DECLARED, _crash)
        results = execute_task(task, TaskContext(RunConfig()))

        assert [(r.check_id, r.paper_anchor) for r in results] == list(DECLARED)
        assert all(r.status is CheckStatus.FAIL for r in results)
        assert results[0].details == {
            "error": "ZeroDivisionError",
            "message": "division by zero",
        }

    def test_library_errors_keep_their_details(self) -> None:
        """Skeinlab errors report their code and details."""
        task = CheckTask("claim", "families", DECLARED[:1], _claim_failed)
        (result,) = execute_task(task, TaskContext(RunConfig()))

        assert result.details["error"] == "claim_failed"
        assert result.details["residual"] == ["(1)*b"]

    def test_crash_is_logged(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The crash is one structured error line on stderr."""
        execute_task(CheckTask("boom", "families", DECLARED, _crash), TaskContext(RunConfig()))

        events = [json.loads(line) for line in capsys.readouterr().err.splitlines()]
        crashed = [e for e in events if e["msg"] == "task_crashed"]
        assert crashed and crashed[0]["task"] == "boom"
        assert crashed[0]["level"] == "ERROR"

    def test_results_pass_through(self) -> None:
        """Results of a healthy task are returned as they are."""
        result = CheckResult(check_id="x.1", status=CheckStatus.PASS, paper_anchor="§1")
        task = CheckTask("ok", "families", DECLARED[:1], lambda ctx: [result])

        assert execute_task(task, TaskContext(RunConfig())) == [result]


class TestRunRegistry:
    """Test whole runs over small manifest directories."""

    @pytest.fixture
    def config(self, tmp_path: Path, write_manifest: Callable[..., Path]) -> RunConfig:
        write_manifest(
            "demo",
            check(check_id="demo.pass"),
            check(check_id="demo.fail", claim={"lhs": "a", "rhs": "b"}),
            check(
                check_id="demo.flagged",
                claim={"lhs": "a", "rhs": "b"},
                open_question=True,
                expect="flagged",
            ),
        )
        return RunConfig(suites=("elimination",), manifest_dir=tmp_path)

    def test_report(self, config: RunConfig) -> None:
        """Results are sorted by id and summarized."""
        report, trace = run_registry(build_registry(config), config)

        assert [r.check_id for r in report.results] == ["demo.fail", "demo.flagged", "demo.pass"]
        assert report.summary == {"pass": 1, "fail": 1, "flagged": 1}
        assert report.failed
        assert report.config == config.echo()
        assert trace is None

    def test_order_does_not_matter(self, config: RunConfig) -> None:
        """Shuffled execution gives the same report."""
        registry = build_registry(config)
        views = [
            run_registry(registry, config, shuffle_seed=seed)[0].deterministic_view()
            for seed in (None, 1, 2)
        ]

        assert views[0] == views[1] == views[2]

    def test_parallel_matches_serial(self, config: RunConfig) -> None:
        """A thread pool gives the same report as a serial run."""
        registry = build_registry(config)
        serial = run_registry(registry, config)[0]
        parallel = run_registry(registry, config.model_copy(update={"jobs": 4}))[0]

        assert serial.deterministic_view() == parallel.deterministic_view()


class TestTrace:
    """Test derivation trace output."""

    @pytest.mark.slow
    def test_trace_written(self, tmp_path: Path) -> None:
        """A reduction run with a trace path writes the rewrite steps."""
        path = tmp_path / "trace.json"
        config = RunConfig(suites=("reduction",), manifest_dir=tmp_path, trace_path=path)
        run_suite(config)

        steps = json.loads(path.read_text(encoding="utf-8"))
        assert steps
        assert {"step", "rule_applied", "before", "after"} <= set(steps[0])

    def test_unwritable_trace(self, tmp_path: Path) -> None:
        """A trace path in a missing directory raises a write error."""
        with pytest.raises(ReportWriteError):
            write_trace([], tmp_path / "missing" / "trace.json")
