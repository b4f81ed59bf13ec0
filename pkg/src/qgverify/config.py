"""Run configuration: defaults, key=value config files and environment overrides."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ParameterError


@dataclass(frozen=True)
class RunConfig:
    prime_count: int = 3
    bareiss_escalation: bool = True
    dense_limit: int = 4096
    cache_dir: Optional[str] = None
    float_tol: float = 1e-10
    k_range: tuple[int, int] = (0, 4)
    parallelism: int = 1
    seed: int = 20120101
    record_timing: bool = True

    def __post_init__(self):
        if self.prime_count < 2:
            raise ParameterError("prime_count must be >= 2")
        if self.dense_limit < 16:
            raise ParameterError("dense_limit must be >= 16")
        lo, hi = self.k_range
        if lo > hi or lo < 0:
            raise ParameterError(f"empty k_range {self.k_range}")
        if self.parallelism < 1:
            raise ParameterError("parallelism must be >= 1")
        if self.float_tol <= 0:
            raise ParameterError("float_tol must be positive")

    @property
    def rank_opts(self) -> dict:
        return {"prime_count": self.prime_count, "seed": self.seed, "escalate": self.bareiss_escalation}

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_range"] = list(self.k_range)
        return d

    def updated(self, **changes) -> "RunConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_k_range(text: str) -> tuple[int, int]:
    """"4" -> (4, 4); "2..6" -> (2, 6)."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            rng = (int(lo), int(hi))
        else:
            rng = (int(text), int(text))
    except ValueError:
        raise ParameterError(f"bad k range {text!r}") from None
    if rng[0] > rng[1] or rng[0] < 0:
        raise ParameterError(f"empty k range {text!r}")
    return rng


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in fields(RunConfig)}
    t = types[name]
    if name == "k_range":
        return parse_k_range(raw)
    if name == "cache_dir":
        return raw or None
    if "bool" in str(t):
        try:
            return _BOOL[raw.strip().lower()]
        except KeyError:
            raise ParameterError(f"{name}: expected a boolean, got {raw!r}") from None
    try:
        return float(raw) if "float" in str(t) else int(raw)
    except ValueError:
        raise ParameterError(f"{name}: cannot parse {raw!r}") from None


def load_config(path: Optional[str] = None, env: Optional[dict] = None) -> RunConfig:
    """Defaults, then the optional key=value file, then QGV_CACHE_DIR / QGV_WORKERS."""
    values: dict = {}
    known = {f.name for f in fields(RunConfig)}
    if path:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(key, raw)
    env = os.environ if env is None else env
    if env.get("QGV_CACHE_DIR"):
        values["cache_dir"] = env["QGV_CACHE_DIR"]
    if env.get("QGV_WORKERS"):
        values["parallelism"] = _coerce("parallelism", env["QGV_WORKERS"])
    return RunConfig(**values)
