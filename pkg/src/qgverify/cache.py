"""On-disk cache of partition enumerations.

File layout: a header line "qgv-partitions v1 <KIND> <k> <count>" followed by
one encoded partition per line.  Files are written to a temporary name and
renamed into place, so readers never see a half-written cache.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .errors import ParameterError
from .partitions import FamilyKind, Partition, belongs_to, enumerate_family

MAGIC = "qgv-partitions v1"


@dataclass
class CacheInfo:
    status: str  # "disabled", "hit", "miss" or "recomputed"
    path: Optional[str] = None
    warning: Optional[str] = None

    def to_dict(self) -> dict:
        return {"status": self.status, "path": self.path, "warning": self.warning}


def cache_path(cache_dir: Union[str, Path], kind: FamilyKind, k: int) -> Path:
    stem = re.sub(r"[^A-Za-z0-9_]+", "_", str(kind)).strip("_")
    return Path(cache_dir) / f"{stem}_{k}.qgvp"


def _header(kind: FamilyKind, k: int, count: int) -> str:
    return f"{MAGIC} {kind} {k} {count}"


def _write(path: Path, kind: FamilyKind, k: int, parts: list[Partition]):
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "".join(p.encode() + "\n" for p in parts)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(_header(kind, k, len(parts)) + "\n" + body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: Path, kind: FamilyKind, k: int) -> list[Partition]:
    """Parse and validate a cache file; raises ValueError on any mismatch."""
    lines = path.read_text().split("\n")
    if not lines or lines[-1] != "":
        raise ValueError("truncated file")
    head = lines[0].split(" ")
    if " ".join(head[:2]) != MAGIC or len(head) != 5:
        raise ValueError(f"bad header {lines[0]!r}")
    if head[2] != str(kind) or head[3] != str(k):
        raise ValueError(f"header is for {head[2]} {head[3]}")
    body = lines[1:-1]
    count = int(head[4])
    if count != len(body):
        raise ValueError(f"header count {count} but {len(body)} entries")
    parts = [Partition.decode(line, k) for line in body]
    for p in parts:
        if not belongs_to(p, kind):
            raise ValueError(f"{p.encode()} is not in {kind}")
    keys = [p.sort_key() for p in parts]
    if any(a >= b for a, b in zip(keys, keys[1:])):
        raise ValueError("entries are not in canonical order")
    return parts


def load_or_enumerate(kind: Union[str, FamilyKind], k: int,
                      cache_dir: Optional[Union[str, Path]] = None) -> tuple[list[Partition], CacheInfo]:
    """Exactly enumerate_family(kind, k), read from or written to `cache_dir` when given."""
    if isinstance(kind, str):
        kind = FamilyKind.parse(kind)
    if cache_dir is None:
        return enumerate_family(kind, k), CacheInfo("disabled")
    path = cache_path(cache_dir, kind, k)
    if path.exists():
        try:
            return _read(path, kind, k), CacheInfo("hit", str(path))
        except (ValueError, ParameterError) as exc:
            warning = f"corrupt cache file {path.name}: {exc}; recomputed"
            parts = enumerate_family(kind, k)
            _write(path, kind, k, parts)
            return parts, CacheInfo("recomputed", str(path), warning)
    parts = enumerate_family(kind, k)
    _write(path, kind, k, parts)
    return parts, CacheInfo("miss", str(path))
