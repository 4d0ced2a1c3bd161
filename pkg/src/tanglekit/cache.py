"""On-disk result cache: one checksummed text file per (kind, n)."""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Callable

FORMAT_VERSION = 1
_MAGIC = "tanglekit-cache"

log = logging.getLogger(__name__)


def default_cache_dir() -> Path | None:
    value = os.environ.get("TANGLEKIT_CACHE")
    return Path(value) if value else None


class ResultCache:
    """Get-or-compute store for text payloads.

    The header line records format version, kind, key and the sha256 of the
    payload.  Anything that fails to verify is recomputed and rewritten.
    ``ResultCache(None)`` is a pass-through.
    """

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root is not None else None

    def path(self, kind: str, key) -> Path:
        assert self.root is not None
        return self.root / f"{kind}-{key}.txt"

    def load(self, kind: str, key) -> str | None:
        if self.root is None:
            return None
        p = self.path(kind, key)
        try:
            raw = p.read_text(encoding="utf-8")
        except (FileNotFoundError, UnicodeDecodeError):
            return None
        header, _, payload = raw.partition("\n")
        parts = header.split(" ")
        expected = [_MAGIC, f"v{FORMAT_VERSION}", kind, str(key)]
        if len(parts) != 5 or parts[:4] != expected or not parts[4].startswith("sha256="):
            log.warning("cache header mismatch in %s; recomputing", p)
            return None
        if hashlib.sha256(payload.encode()).hexdigest() != parts[4][7:]:
            log.warning("cache checksum mismatch in %s; recomputing", p)
            return None
        return payload

    def store(self, kind: str, key, payload: str):
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        digest = hashlib.sha256(payload.encode()).hexdigest()
        text = f"{_MAGIC} v{FORMAT_VERSION} {kind} {key} sha256={digest}\n{payload}"
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, self.path(kind, key))

    def get_or_compute(self, kind: str, key, compute: Callable[[], str]) -> str:
        payload = self.load(kind, key)
        if payload is None:
            payload = compute()
            self.store(kind, key, payload)
        return payload
