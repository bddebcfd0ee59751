"""
Structured JSON logging for the skeinlab CLI.

Every event of a run (start, each finished check, the summary, the report
destination) is one JSON object on one line. Log lines go to stderr so that a
report printed to stdout stays machine readable.

Standard fields on every line: `ts`, `service`, `env`, `version`, `level` and
`msg`. Callers add their own fields as keyword arguments. `env` is "local"
until `configure` copies it from the loaded `SkeinlabConfig`.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from typing import Any

from . import SERVICE_NAME, __version__

_LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40, "CRITICAL": 50}
_threshold = _LEVELS["INFO"]
_env = "local"


def _normalize_level(level: str) -> str:
    """Uppercases `level`; unknown levels become INFO."""
    level_upper = level.upper()
    return level_upper if level_upper in _LEVELS else "INFO"


def set_level(level: str) -> None:
    """Drops events below `level` from then on."""
    global _threshold
    _threshold = _LEVELS[_normalize_level(level)]


def configure(level: str, environment: str) -> None:
    """Applies the `log_level` and `environment` of a loaded configuration."""
    global _env
    set_level(level)
    _env = environment


def log_event(level: str, msg: str, **fields: Any) -> None:
    """
    Emits one structured log line to stderr.

    Example:
    ```python
    log_event("INFO", "check_finished", check_id="appB.relation-eta-1", status="pass")
    ```

    Args:
        level: Severity ("DEBUG", "INFO", "WARNING", "ERROR").
        msg: Event name.
        **fields: Extra key-value pairs added to the root of the JSON object.
    """
    normalized = _normalize_level(level)
    if _LEVELS[normalized] < _threshold:
        return
    record = {
        "ts": datetime.now(timezone.utc).isoformat(),
        "service": SERVICE_NAME,
        "env": _env,
        "version": __version__,
        "level": normalized,
        "msg": msg,
    }
    record.update(fields)
    print(json.dumps(record, separators=(",", ":"), default=str), file=sys.stderr, flush=True)
