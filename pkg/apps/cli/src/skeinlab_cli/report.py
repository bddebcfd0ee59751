"""
Report emission.

JSON reports follow the `Report` model: config echo, results, summary counts
and the manifest hash. Text reports are a table with one line per check,
followed by the flagged checks and the summary.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Literal

from skeinlab_core.errors import ReportWriteError
from skeinlab_core.results import CheckStatus

from .logger import log_event
from .models import Report

ReportFormat = Literal["json", "text"]

_STATUS_LABEL = {
    CheckStatus.PASS: "PASS",
    CheckStatus.FAIL: "FAIL",
    CheckStatus.FLAGGED: "FLAGGED",
}


def render_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def render_text(report: Report) -> str:
    width = max((len(r.check_id) for r in report.results), default=8) + 2
    lines = [
        f"skeinlab {report.version}  manifests {report.manifest_hash[:12]}",
        "",
        f"{'STATUS':<9}{'CHECK':<{width}}ANCHOR",
    ]
    for r in report.results:
        lines.append(f"{_STATUS_LABEL[r.status]:<9}{r.check_id:<{width}}{r.paper_anchor}")
    flagged = report.flagged()
    if flagged:
        lines += ["", "Flagged (discrepancies in the source text):"]
        for r in flagged:
            residual = r.details.get("residual")
            suffix = f"  residual: {', '.join(residual)}" if residual else ""
            lines.append(f"  {r.check_id}{suffix}")
    s = report.summary
    lines += ["", f"pass {s['pass']}  fail {s['fail']}  flagged {s['flagged']}"]
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: ReportFormat = "text", out: Path | None = None) -> None:
    """
    Writes the report to `out`, or to stdout when `out` is None.

    Raises:
        ReportWriteError: if `out` cannot be written.
    """
    text = render_json(report) if fmt == "json" else render_text(report)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        out.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(f"cannot write report: {exc}", path=str(out)) from exc
    log_event("INFO", "report_written", path=str(out), format=fmt)
