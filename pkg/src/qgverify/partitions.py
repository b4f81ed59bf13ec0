"""Set partitions of {1..k} and the partition families used by the checker.

Partitions are immutable and kept in canonical form: blocks sorted by their
minimum, points ascending inside each block.  Optional colors are carried per
block, aligned with the canonical block order.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import ParameterError

__all__ = [
    "Partition",
    "FamilyKind",
    "NC2",
    "P2",
    "NC21",
    "SET_PARTITIONS",
    "EVENODD_NC",
    "EVENODD_ALL",
    "nc21_s",
    "colored_nc2",
    "enumerate_family",
    "is_noncrossing",
    "join_block_count",
    "colorings",
]


@dataclass(frozen=True)
class Partition:
    points: int
    blocks: tuple[tuple[int, ...], ...]
    colors: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.points < 0:
            raise ParameterError(f"negative point count {self.points}")
        blocks = [tuple(sorted(b)) for b in self.blocks]
        if any(len(b) == 0 for b in blocks):
            raise ParameterError("empty block")
        colors = None if self.colors is None else tuple(self.colors)
        if colors is not None and len(colors) != len(blocks):
            raise ParameterError("one color per block required")
        order = sorted(range(len(blocks)), key=lambda i: blocks[i][0])
        blocks = tuple(blocks[i] for i in order)
        if colors is not None:
            colors = tuple(colors[i] for i in order)
        flat = sorted(x for b in blocks for x in b)
        if flat != list(range(1, self.points + 1)):
            raise ParameterError(f"blocks {blocks} do not partition 1..{self.points}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "colors", colors)

    @classmethod
    def _trusted(cls, points, blocks, colors=None):
        # blocks already canonical; skips validation on hot enumeration paths
        obj = object.__new__(cls)
        object.__setattr__(obj, "points", points)
        object.__setattr__(obj, "blocks", blocks)
        object.__setattr__(obj, "colors", colors)
        return obj

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], colors=None, points=None):
        blocks = tuple(tuple(b) for b in blocks)
        if points is None:
            points = sum(len(b) for b in blocks)
        return cls(points, blocks, None if colors is None else tuple(colors))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def singletons(self) -> tuple[int, ...]:
        """Points of the singleton blocks, left to right."""
        return tuple(b[0] for b in self.blocks if len(b) == 1)

    @property
    def pairs(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) == 2)

    @property
    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    @property
    def is_colored(self) -> bool:
        return self.colors is not None

    def uncolored(self) -> "Partition":
        return Partition(self.points, self.blocks)

    def with_colors(self, colors: Sequence[int]) -> "Partition":
        return Partition(self.points, self.blocks, tuple(colors))

    def block_of(self) -> list[int]:
        """Map point (1-based) -> block index; slot 0 unused."""
        owner = [-1] * (self.points + 1)
        for i, b in enumerate(self.blocks):
            for x in b:
                owner[x] = i
        return owner

    def sort_key(self):
        return (self.blocks, self.colors or ())

    def encode(self) -> str:
        sep = "," if self.points > 9 else ""
        parts = []
        for i, b in enumerate(self.blocks):
            s = sep.join(str(x) for x in b)
            if self.colors is not None:
                s += f":{self.colors[i]}"
            parts.append(s)
        return "|".join(parts)

    @classmethod
    def decode(cls, text: str, points: int) -> "Partition":
        if text == "":
            return cls(points, ())
        blocks, colors = [], []
        for part in text.split("|"):
            body, _, color = part.partition(":")
            if "," in body or points > 9:
                elems = [int(x) for x in body.split(",")]
            else:
                elems = [int(x) for x in body]
            blocks.append(tuple(elems))
            colors.append(int(color) if color else None)
        if all(c is None for c in colors):
            return cls(points, tuple(blocks))
        if any(c is None for c in colors):
            raise ParameterError(f"partially colored encoding {text!r}")
        return cls(points, tuple(blocks), tuple(colors))

    def __str__(self):
        return self.encode() or "∅"


@dataclass(frozen=True)
class FamilyKind:
    name: str
    param: Optional[int] = None

    _NAMES = ("NC2", "P2", "NC21", "NC21_S", "SET_PARTITIONS", "EVENODD_NC", "EVENODD_ALL", "COLORED_NC2")
    _ALIASES = {
        "nc2": "NC2",
        "p2": "P2",
        "nc21": "NC21",
        "nc21_s": "NC21_S",
        "set": "SET_PARTITIONS",
        "set_partitions": "SET_PARTITIONS",
        "evenodd_nc": "EVENODD_NC",
        "evenodd_all": "EVENODD_ALL",
        "colored_nc2": "COLORED_NC2",
    }

    def __post_init__(self):
        if self.name not in self._NAMES:
            raise ParameterError(f"unknown family kind {self.name!r}")
        needs_param = self.name in ("NC21_S", "COLORED_NC2")
        if needs_param and self.param is None:
            raise ParameterError(f"{self.name} needs a parameter")
        if not needs_param and self.param is not None:
            raise ParameterError(f"{self.name} takes no parameter")
        if self.name == "NC21_S" and self.param < 0:
            raise ParameterError("singleton count must be non-negative")
        if self.name == "COLORED_NC2" and self.param < 1:
            raise ParameterError("need at least one color")

    def __str__(self):
        return self.name if self.param is None else f"{self.name}({self.param})"

    @classmethod
    def parse(cls, text: str) -> "FamilyKind":
        """Accepts "nc2", "nc21_s:2", "NC21_S(2)", "colored_nc2:3", ..."""
        m = re.fullmatch(r"\s*([A-Za-z0-9_]+)\s*(?:[:(]\s*(\d+)\s*\)?)?\s*", text)
        if not m:
            raise ParameterError(f"cannot parse family kind {text!r}")
        raw, param = m.group(1), m.group(2)
        name = cls._ALIASES.get(raw.lower(), raw.upper())
        return cls(name, None if param is None else int(param))


NC2 = FamilyKind("NC2")
P2 = FamilyKind("P2")
NC21 = FamilyKind("NC21")
SET_PARTITIONS = FamilyKind("SET_PARTITIONS")
EVENODD_NC = FamilyKind("EVENODD_NC")
EVENODD_ALL = FamilyKind("EVENODD_ALL")


def nc21_s(s: int) -> FamilyKind:
    return FamilyKind("NC21_S", s)


def colored_nc2(num_colors: int) -> FamilyKind:
    return FamilyKind("COLORED_NC2", num_colors)


# Recursive generators work on tuples of point labels and yield lists of blocks.

def _nc2(pts):
    if not pts:
        yield []
        return
    first = pts[0]
    for j in range(1, len(pts), 2):
        for inner in _nc2(pts[1:j]):
            for outer in _nc2(pts[j + 1:]):
                yield [(first, pts[j])] + inner + outer


def _nc21(pts, s=None):
    # s: required number of singletons, or None for any
    if not pts:
        if s is None or s == 0:
            yield []
        return
    if s is not None and (s > len(pts) or (len(pts) - s) % 2):
        return
    first = pts[0]
    if s is None or s > 0:
        for rest in _nc21(pts[1:], None if s is None else s - 1):
            yield [(first,)] + rest
    for j in range(1, len(pts)):
        inside, outside = pts[1:j], pts[j + 1:]
        if s is None:
            for inner in _nc21(inside):
                for outer in _nc21(outside):
                    yield [(first, pts[j])] + inner + outer
        else:
            for si in range(0, min(s, len(inside)) + 1):
                for inner in _nc21(inside, si):
                    for outer in _nc21(outside, s - si):
                        yield [(first, pts[j])] + inner + outer


def _p2(pts):
    if not pts:
        yield []
        return
    first = pts[0]
    for j in range(1, len(pts)):
        rest = pts[1:j] + pts[j + 1:]
        for m in _p2(rest):
            yield [(first, pts[j])] + m


def _set_partitions(pts):
    # the block containing the first point is {first} plus any subset of the rest
    if not pts:
        yield []
        return
    first, rest = pts[0], pts[1:]
    for r in range(len(rest) + 1):
        for chosen in itertools.combinations(rest, r):
            remaining = tuple(x for x in rest if x not in chosen)
            for m in _set_partitions(remaining):
                yield [(first,) + chosen] + m


def _evenodd_all(k):
    odds = tuple(range(1, k + 1, 2))
    evens = tuple(range(2, k + 1, 2))
    for perm in itertools.permutations(evens):
        yield sorted((min(a, b), max(a, b)) for a, b in zip(odds, perm))


def _is_evenodd(p: Partition) -> bool:
    return all(len(b) == 2 and (b[0] + b[1]) % 2 == 1 for b in p.blocks)


def enumerate_family(kind: FamilyKind, k: int) -> list[Partition]:
    """All partitions of {1..k} in the family `kind`, sorted canonically."""
    if k < 0:
        raise ParameterError(f"negative point count {k}")
    pts = tuple(range(1, k + 1))
    name = kind.name
    if name == "NC21_S":
        if kind.param > k:
            raise ParameterError(f"NC21_S({kind.param}) impossible with {k} points")
        raw = _nc21(pts, kind.param)
    elif name == "NC21":
        raw = _nc21(pts)
    elif name == "SET_PARTITIONS":
        raw = _set_partitions(pts)
    elif k % 2:
        return []
    elif name in ("NC2", "COLORED_NC2"):
        raw = _nc2(pts)
    elif name == "EVENODD_NC":
        raw = (b for b in _nc2(pts) if all((x + y) % 2 for x, y in b))
    elif name == "P2":
        raw = _p2(pts)
    elif name == "EVENODD_ALL":
        raw = _evenodd_all(k)
    else:  # pragma: no cover - FamilyKind validates names
        raise ParameterError(f"unhandled kind {kind}")
    out = [Partition._trusted(k, tuple(b)) for b in raw]
    if name == "COLORED_NC2":
        out = [c for p in out for c in colorings(p, kind.param)]
    out.sort(key=Partition.sort_key)
    return out


def belongs_to(p: Partition, kind: FamilyKind) -> bool:
    """Membership test matching enumerate_family(kind, p.points)."""
    name = kind.name
    sizes = [len(b) for b in p.blocks]
    if name == "COLORED_NC2":
        if p.colors is None or any(c < 1 or c > kind.param for c in p.colors):
            return False
    elif p.is_colored:
        return False
    if name == "SET_PARTITIONS":
        return True
    if name in ("NC21", "NC21_S"):
        if any(s > 2 for s in sizes) or not is_noncrossing(p):
            return False
        return name == "NC21" or sizes.count(1) == kind.param
    if any(s != 2 for s in sizes):
        return False
    if name == "P2":
        return True
    if name == "EVENODD_ALL":
        return _is_evenodd(p)
    return is_noncrossing(p) and (name != "EVENODD_NC" or _is_evenodd(p))


def is_noncrossing(p: Partition) -> bool:
    """True iff no two distinct blocks interleave as a < b < c < d."""
    for x, y in itertools.combinations(p.blocks, 2):
        if len(x) == 1 or len(y) == 1:
            continue
        if _interleave(x, y) or _interleave(y, x):
            return False
    return True


def _interleave(x, y) -> bool:
    for a, c in itertools.combinations(x, 2):
        inside = any(a < b < c for b in y)
        outside = any(d > c for d in y)
        if inside and outside:
            return True
    return False


def join_block_count(p: Partition, q: Partition) -> int:
    """Number of blocks of the lattice join p ∨ q.

    For two pairings this is the number of closed loops obtained by stacking
    one diagram on the other, so that <T_p, T_q> = N ** join_block_count(p, q).
    """
    if p.points != q.points:
        raise ParameterError(f"point counts differ: {p.points} vs {q.points}")
    if p.is_colored or q.is_colored:
        raise ParameterError("join_block_count needs uncolored partitions")
    parent = list(range(p.points + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = p.points
    for part in (p, q):
        for b in part.blocks:
            r0 = find(b[0])
            for x in b[1:]:
                r = find(x)
                if r != r0:
                    parent[r] = r0
                    count -= 1
    return count


def colorings(p: Partition, num_colors: int) -> list[Partition]:
    """Every assignment of colors 1..num_colors to the blocks of p."""
    if num_colors < 1:
        raise ParameterError("num_colors must be >= 1")
    if p.is_colored:
        raise ParameterError("partition is already colored")
    return [Partition._trusted(p.points, p.blocks, c) for c in itertools.product(range(1, num_colors + 1), repeat=p.num_blocks)]
