"""Tests for the settings layer."""

from __future__ import annotations

import pytest

pytest.importorskip("pydantic_settings")

from skeinlab_core.config import (  # noqa: E402
    SkeinlabConfig,
    get_config,
    parse_n_values,
    reset_config,
)


class TestParseNValues:
    """Test the n-value list parser."""

    def test_sorted_and_deduplicated(self) -> None:
        """Entries are sorted and unique."""
        assert parse_n_values("5, 1,3,1") == (1, 3, 5)

    @pytest.mark.parametrize("text", ["2", "1,x", "-1", "", " , "])
    def test_rejected(self, text: str) -> None:
        """Even, negative, non-integer and empty lists fail."""
        with pytest.raises(ValueError):
            parse_n_values(text)


class TestSkeinlabConfig:
    """Test environment loading and validation."""

    def test_defaults(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Defaults describe a quick exact run."""
        for name in ("SKEINLAB_KMAX", "SKEINLAB_MODE", "SKEINLAB_N_VALUES", "SKEINLAB_JOBS"):
            monkeypatch.delenv(name, raising=False)
        config = SkeinlabConfig()

        assert config.kmax == 6
        assert config.mode == "exact"
        assert config.n_list == (1, 3)
        assert config.jobs == 1

    def test_environment_override(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """SKEINLAB_* variables override defaults."""
        monkeypatch.setenv("SKEINLAB_NMAX", "4")
        monkeypatch.setenv("SKEINLAB_N_VALUES", "1,5")
        monkeypatch.setenv("SKEINLAB_LOG_LEVEL", "debug")
        config = SkeinlabConfig()

        assert config.nmax == 4
        assert config.n_list == (1, 5)
        assert config.log_level == "DEBUG"

    def test_clamping(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Out-of-range integers are clamped, not rejected."""
        monkeypatch.setenv("SKEINLAB_KMAX", "50")
        monkeypatch.setenv("SKEINLAB_NMAX", "0")
        monkeypatch.setenv("SKEINLAB_JOBS", "500")
        config = SkeinlabConfig()

        assert config.kmax == 12
        assert config.nmax == 3
        assert config.jobs == 64

    def test_even_n_rejected(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Even n values fail at load time."""
        monkeypatch.setenv("SKEINLAB_N_VALUES", "1,2")
        with pytest.raises(ValueError):
            SkeinlabConfig()

    def test_float_mode_precision(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Float mode needs at least 128 bits."""
        monkeypatch.setenv("SKEINLAB_MODE", "float")
        monkeypatch.setenv("SKEINLAB_PRECISION", "64")
        with pytest.raises(ValueError, match="128"):
            SkeinlabConfig()

    def test_unknown_log_level(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Log levels are validated."""
        monkeypatch.setenv("SKEINLAB_LOG_LEVEL", "chatty")
        with pytest.raises(ValueError):
            SkeinlabConfig()

    def test_log_summary(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """The summary echoes the run parameters."""
        monkeypatch.delenv("SKEINLAB_MANIFEST_DIR", raising=False)
        summary = SkeinlabConfig().log_summary()

        assert summary["manifest_dir"] is None
        assert set(summary) >= {"kmax", "nmax", "n_values", "mode", "precision", "jobs"}


class TestSingleton:
    """Test get_config and reset_config."""

    def test_cached(self) -> None:
        """get_config returns the same instance until reset."""
        first = get_config()
        assert get_config() is first
        reset_config()
        assert get_config() is not first

    def test_reset_picks_up_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """A reset re-reads the environment."""
        get_config()
        monkeypatch.setenv("SKEINLAB_KMAX", "9")
        reset_config()
        assert get_config().kmax == 9
