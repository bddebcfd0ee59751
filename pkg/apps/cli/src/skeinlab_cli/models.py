"""
Run configuration and report models.

`RunConfig` is what one `skeinlab verify` invocation runs with: the
`SkeinlabConfig` defaults with command-line flags applied on top. `Report` is
what it produces; its JSON form is the machine-readable output of the tool.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, ValidationInfo, field_validator

from skeinlab_core.config import SkeinlabConfig, check_float_precision, clamp, parse_n_values
from skeinlab_core.results import CheckResult, CheckStatus

SUITES: tuple[str, ...] = (
    "families",
    "matrix",
    "elimination",
    "appendixC",
    "reduction",
    "quotient",
    "character",
)


def parse_suites(text: str) -> tuple[str, ...]:
    """Parses a comma list of suite names, keeping the canonical suite order."""
    names = {part.strip() for part in text.split(",") if part.strip()}
    unknown = sorted(names - set(SUITES))
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    if not names:
        raise ValueError("at least one suite is required")
    return tuple(s for s in SUITES if s in names)


class RunConfig(BaseModel):
    """Everything a run depends on. Two runs with equal configs report equal results."""

    model_config = ConfigDict(frozen=True)

    suites: tuple[str, ...] = SUITES
    kmax: int = 6
    nmax: int = 6
    n_values: tuple[int, ...] = (1, 3)
    mode: Literal["exact", "float"] = "exact"
    precision: int = 128
    jobs: int = 1
    manifest_dir: Path | None = None
    trace_path: Path | None = None

    @field_validator("suites")
    @classmethod
    def validate_suites(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        return parse_suites(",".join(v))

    @field_validator("n_values")
    @classmethod
    def validate_n_values(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        return parse_n_values(",".join(str(n) for n in v))

    @field_validator("kmax", "nmax", "precision", "jobs")
    @classmethod
    def clamp_ranges(cls, v: int, info: ValidationInfo) -> int:
        """Clamps flag values to the same ranges as `SkeinlabConfig`."""
        return clamp(info.field_name, v)

    def model_post_init(self, __context: object) -> None:
        check_float_precision(self.mode, self.precision)

    @classmethod
    def from_settings(cls, settings: SkeinlabConfig, **overrides: Any) -> RunConfig:
        """Settings defaults, with every override that is not None applied on top."""
        values: dict[str, Any] = {
            "kmax": settings.kmax,
            "nmax": settings.nmax,
            "n_values": settings.n_list,
            "mode": settings.mode,
            "precision": settings.precision,
            "jobs": settings.jobs,
            "manifest_dir": settings.manifest_dir,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def echo(self) -> dict[str, Any]:
        """The report's config block. Paths that only affect side outputs are left out."""
        return {
            "suites": list(self.suites),
            "kmax": self.kmax,
            "nmax": self.nmax,
            "n_values": list(self.n_values),
            "mode": self.mode,
            "precision": self.precision,
            "manifest_dir": str(self.manifest_dir) if self.manifest_dir else None,
        }


def summarize(results: Iterable[CheckResult]) -> dict[str, int]:
    counts = Counter(r.status for r in results)
    return {status.value: counts.get(status, 0) for status in CheckStatus}


class Report(BaseModel):
    tool: str = "skeinlab"
    version: str
    config: dict[str, Any]
    manifest_hash: str
    results: list[CheckResult]
    summary: dict[str, int]

    @property
    def failed(self) -> bool:
        return self.summary.get(CheckStatus.FAIL.value, 0) > 0

    def flagged(self) -> list[CheckResult]:
        return [r for r in self.results if r.status is CheckStatus.FLAGGED]

    def deterministic_view(self) -> dict[str, Any]:
        """The report without timing fields; equal for equal configs and manifests."""
        data = self.model_dump(mode="json")
        for result in data["results"]:
            result.pop("runtime_ms", None)
        return data
