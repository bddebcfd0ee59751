"""
Centralized configuration for skeinlab runs.

Every tunable of a verification run lives here, loaded from environment
variables through pydantic-settings. Command-line flags override these values
per run; the library itself never reads the environment directly.

Core Features:
- **Type Safety**: every field is typed and validated on load.
- **Clamping**: parameter ranges (kmax, nmax, precision, jobs) are clamped to
  ranges the verifiers can finish in reasonable time.
- **Cross-field checks**: `model_post_init` rejects n values the character
  verifier cannot use and float runs at too low a precision.
- **Singleton Access**: `get_config` builds the instance lazily; `reset_config`
  drops it so tests can change the environment.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

MIN_FLOAT_PRECISION = 128

# inclusive ranges; values outside are clamped, never rejected
BOUNDS: dict[str, tuple[int, int]] = {
    "kmax": (4, 12),
    "nmax": (3, 12),
    "precision": (64, 4096),
    "jobs": (1, 64),
}


def clamp(name: str, value: int) -> int:
    low, high = BOUNDS[name]
    return max(low, min(value, high))


def check_float_precision(mode: str, precision: int) -> None:
    """Raises ValueError for float mode below `MIN_FLOAT_PRECISION` bits."""
    if mode == "float" and precision < MIN_FLOAT_PRECISION:
        raise ValueError(
            f"float mode needs SKEINLAB_PRECISION >= {MIN_FLOAT_PRECISION}, got {precision}"
        )


def parse_n_values(text: str) -> tuple[int, ...]:
    """Parses a comma list such as "1,3" into odd positive integers."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            n = int(part)
        except ValueError:
            raise ValueError(f"n values must be integers, got {part!r}") from None
        if n < 1 or n % 2 == 0:
            raise ValueError(f"n values must be odd and positive, got {n}")
        values.append(n)
    if not values:
        raise ValueError("at least one n value is required")
    return tuple(sorted(set(values)))


class SkeinlabConfig(BaseSettings):
    """
    Configuration schema for a verification run.

    Each attribute maps to one `SKEINLAB_*` environment variable through its
    alias. Integer ranges are clamped rather than rejected.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
        populate_by_name=True,
    )

    # --- Runtime Environment ---
    environment: Literal["local", "dev", "ci"] = Field(
        default="local",
        alias="SKEINLAB_ENV",
        description="Deployment environment, echoed into every log line.",
    )
    manifest_dir: Path | None = Field(
        default=None,
        alias="SKEINLAB_MANIFEST_DIR",
        description="Directory of manifest JSON files; the packaged manifests when unset.",
    )
    log_level: str = Field(
        default="INFO", alias="SKEINLAB_LOG_LEVEL", description="Minimum log level."
    )

    # --- Parameter Ranges ---
    kmax: int = Field(
        default=6, alias="SKEINLAB_KMAX", description="Largest |k| in family identity grids."
    )
    nmax: int = Field(
        default=6, alias="SKEINLAB_NMAX", description="Largest n in family identity grids."
    )
    n_values: str = Field(
        default="1,3",
        alias="SKEINLAB_N_VALUES",
        description="Comma list of odd n for the [[3, n, 3]] character checks.",
    )

    # --- Arithmetic ---
    mode: Literal["exact", "float"] = Field(
        default="exact",
        alias="SKEINLAB_MODE",
        description="Cyclotomic arithmetic: exact field elements or mpmath floats.",
    )
    precision: int = Field(
        default=128,
        alias="SKEINLAB_PRECISION",
        description="Binary precision of float mode and of float determinants.",
    )

    # --- Execution ---
    jobs: int = Field(
        default=1, alias="SKEINLAB_JOBS", description="Checks evaluated in parallel."
    )

    @field_validator("kmax")
    @classmethod
    def validate_kmax(cls, v: int) -> int:
        """Clamps kmax to 4-12."""
        return clamp("kmax", v)

    @field_validator("nmax")
    @classmethod
    def validate_nmax(cls, v: int) -> int:
        """Clamps nmax to 3-12."""
        return clamp("nmax", v)

    @field_validator("precision")
    @classmethod
    def validate_precision(cls, v: int) -> int:
        """Clamps the precision to 64-4096 bits."""
        return clamp("precision", v)

    @field_validator("jobs")
    @classmethod
    def validate_jobs(cls, v: int) -> int:
        """Clamps the worker count to 1-64."""
        return clamp("jobs", v)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
            raise ValueError(f"unknown log level {v!r}")
        return level

    def model_post_init(self, __context: object) -> None:
        """
        Cross-field validation.

        Raises:
            ValueError: if `n_values` holds an even or non-positive entry, or if
                float mode is requested below 128 bits of precision.
        """
        parse_n_values(self.n_values)
        check_float_precision(self.mode, self.precision)

    @property
    def n_list(self) -> tuple[int, ...]:
        return parse_n_values(self.n_values)

    def log_summary(self) -> dict[str, str | int | list[int] | None]:
        """Configuration echo for startup logs and reports."""
        return {
            "environment": self.environment,
            "manifest_dir": str(self.manifest_dir) if self.manifest_dir else None,
            "kmax": self.kmax,
            "nmax": self.nmax,
            "n_values": list(self.n_list),
            "mode": self.mode,
            "precision": self.precision,
            "jobs": self.jobs,
        }


_config: SkeinlabConfig | None = None


def get_config() -> SkeinlabConfig:
    """Returns the process-wide configuration, loading it on first use."""
    global _config
    if _config is None:
        _config = SkeinlabConfig()
    return _config


def reset_config() -> None:
    """Drops the cached configuration. Intended for tests."""
    global _config
    _config = None
