"""
Suite orchestration.

`run_suite` executes the registered tasks of a `RunConfig`, up to `jobs` at a
time, and aggregates their results into a `Report`. Tasks share no mutable
state; a task that raises is turned into fail results for every check it
declared, so one broken verifier never aborts the run or touches another
check's verdict.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from skeinlab_core.errors import ReportWriteError, SkeinlabError
from skeinlab_core.reduction import Trace
from skeinlab_core.results import CheckResult, CheckStatus, elapsed_ms

from . import __version__
from .logger import log_event
from .models import Report, RunConfig, summarize
from .registry import CheckTask, Registry, TaskContext, build_registry


def _error_details(exc: Exception) -> dict[str, Any]:
    if isinstance(exc, SkeinlabError):
        return exc.as_details()
    return {"error": type(exc).__name__, "message": str(exc)}


def execute_task(task: CheckTask, ctx: TaskContext) -> list[CheckResult]:
    """Runs one task; exceptions become fail results for each declared check."""
    started = time.perf_counter()
    try:
        results = task.run(ctx)
    except Exception as exc:
        log_event("ERROR", "task_crashed", task=task.name, error=str(exc))
        details = _error_details(exc)
        return [
            CheckResult(
                check_id=check_id,
                status=CheckStatus.FAIL,
                paper_anchor=anchor,
                details=details,
                runtime_ms=elapsed_ms(started),
            )
            for check_id, anchor in task.checks
        ]
    declared = {cid for cid, _ in task.checks}
    reported = {r.check_id for r in results}
    if declared != reported:
        log_event(
            "WARNING",
            "task_ids_differ",
            task=task.name,
            missing=sorted(declared - reported),
            unexpected=sorted(reported - declared),
        )
    for r in results:
        log_event(
            "INFO",
            "check_finished",
            check_id=r.check_id,
            status=r.status.value,
            runtime_ms=r.runtime_ms,
        )
    return results


def run_registry(
    registry: Registry, config: RunConfig, *, shuffle_seed: int | None = None
) -> tuple[Report, Trace | None]:
    """
    Runs every task of `registry`.

    `shuffle_seed` randomizes the execution order; the report is sorted by
    check id so it does not depend on the order.
    """
    trace: Trace | None = [] if config.trace_path else None
    ctx = TaskContext(config, trace)
    tasks = list(registry.tasks)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(tasks)

    log_event("INFO", "run_started", tasks=len(tasks), **config.echo())
    if config.jobs == 1:
        batches = [execute_task(t, ctx) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            batches = list(pool.map(lambda t: execute_task(t, ctx), tasks))

    results = sorted((r for batch in batches for r in batch), key=lambda r: r.check_id)
    summary = summarize(results)
    report = Report(
        version=__version__,
        config=config.echo(),
        manifest_hash=registry.manifest_hash,
        results=results,
        summary=summary,
    )
    log_event("INFO", "run_finished", **summary)
    for r in report.flagged():
        log_event("WARNING", "check_flagged", check_id=r.check_id, anchor=r.paper_anchor)
    return report, trace


def run_suite(config: RunConfig) -> Report:
    """
    Builds the registry for `config`, runs it and writes the trace if requested.

    Raises:
        ManifestParseError: if a manifest does not load.
        ConfigError: if a manifest check collides with a built-in id.
        ReportWriteError: if the trace file cannot be written.
    """
    registry = build_registry(config)
    report, trace = run_registry(registry, config)
    if config.trace_path is not None and trace is not None:
        write_trace(trace, config.trace_path)
    return report


def write_trace(trace: Trace, path: Path) -> None:
    try:
        path.write_text(json.dumps(trace, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(f"cannot write trace: {exc}", path=str(path)) from exc
    log_event("INFO", "trace_written", path=str(path), steps=len(trace))
