"""
skeinlab command-line harness.

This package wires the verifiers of `skeinlab_core` into a single `skeinlab`
command. It defines the metadata every structured log line carries.

Key Responsibilities of this Module:
- **Service Identification**: `SERVICE_NAME` marks log lines as coming from the
  CLI.
- **Version Management**: the version is read from the installed package
  metadata, with a fallback for source checkouts.
"""

from importlib import metadata
from typing import Final

SERVICE_NAME: Final[str] = "cli"

try:
    __version__ = metadata.version("skeinlab-cli")
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

__all__ = ["SERVICE_NAME", "__version__"]
