"""Seed derivation, config hashing, atomic file writes."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile


def derive_seed(seed: int, label: str) -> int:
    """Stable 63-bit seed for a named stage, derived from the top-level seed."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def config_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, ensure_ascii=False, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def atomic_write(path: str, text: str) -> None:
    """Write via a temp file + rename so interrupted runs never leave a
    partial artifact at the final path."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
