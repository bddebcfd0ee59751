"""Pytest configuration for skeinlab_core tests."""

from __future__ import annotations

from collections.abc import Callable, Generator

import pytest

from skeinlab_core.algebra import MPoly
from skeinlab_core.expr import parse_mpoly


@pytest.fixture(autouse=True)
def reset_config_for_tests() -> Generator[None, None, None]:
    """Reset config before and after each test when pydantic-settings is available."""
    try:
        from skeinlab_core.config import reset_config
    except ImportError:
        yield
        return
    reset_config()
    yield
    reset_config()


@pytest.fixture(scope="session")
def poly() -> Callable[[str], MPoly]:
    """Parser for polynomial literals in manifest syntax."""
    return parse_mpoly
