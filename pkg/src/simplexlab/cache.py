"""On-disk results cache: one JSON file per entry, named by the key's SHA-256."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__


@dataclass(frozen=True)
class CacheEntry:
    key: tuple[str, str, int]
    value: str
    created: float
    tool_version: str
    error_bound: str = ""


def key_digest(key: tuple[str, str, int]) -> str:
    op, params, digits = key
    return hashlib.sha256(f"{op}|{params}|{digits}".encode()).hexdigest()


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ResultCache:
    """Key is ``(operation, canonical parameter string, digits)``.

    Digits are part of the key, so a higher-precision run never replaces a
    lower-precision entry.  Writes go through a temp file and ``os.replace``.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    def path_for(self, key) -> Path:
        return self.root / f"{key_digest(tuple(key))}.json"

    def get(self, key) -> CacheEntry | None:
        p = self.path_for(key)
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            self.misses += 1
            return None
        if tuple(raw["key"]) != tuple(key):
            self.misses += 1
            return None
        self.hits += 1
        raw["key"] = tuple(raw["key"])
        return CacheEntry(**raw)

    def put(self, key, value: str, error_bound: str = "") -> CacheEntry:
        entry = CacheEntry(tuple(key), value, time.time(), __version__, error_bound)
        atomic_write_text(self.path_for(key), json.dumps(asdict(entry), sort_keys=True))
        return entry
