"""
Canonical JSON and content hashes for loaded manifests.

A report records one hash over every manifest it ran, so two reports can be
compared for identical inputs without shipping the manifests themselves. The
hash is computed over a canonical JSON rendering, which makes it independent of
key order and whitespace in the source files.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable
from typing import Any


def stable_dumps(obj: Any) -> str:
    """
    Serializes a JSON-compatible value to a canonical string.

    Args:
        obj: A value built from dicts, lists, strings, numbers, booleans and None.

    Returns:
        A compact JSON string with sorted keys.
    """
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(obj: Any) -> str:
    """SHA256 of `stable_dumps(obj)` as 64 hex characters."""
    return hashlib.sha256(stable_dumps(obj).encode("utf-8")).hexdigest()


def manifest_hash(documents: Iterable[tuple[str, Any]]) -> str:
    """
    Hashes a set of parsed manifests.

    Args:
        documents: `(name, parsed JSON)` pairs. The order does not matter; the
            documents are sorted by name before hashing.

    Returns:
        A 64-character hexadecimal SHA256 digest. An empty set hashes to the
        digest of `[]`.
    """
    ordered = sorted(documents, key=lambda item: item[0])
    return content_hash([[name, doc] for name, doc in ordered])
