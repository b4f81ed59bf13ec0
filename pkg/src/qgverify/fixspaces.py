"""Spanning families for the fixed-point spaces of the subgroups under study.

Each subgroup of O_N^+ (or the unitary pictures used for the free-product
argument) is named by a `SubgroupDescriptor`.  `generator_family` turns a
descriptor into an ordered list of diagram tensors spanning Fix_k.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, ResourceError
from .family import GeneratorFamily, Member
from .linalg import RationalMatrix
from .partitions import (
    EVENODD_ALL,
    EVENODD_NC,
    NC2,
    NC21,
    P2,
    SET_PARTITIONS,
    colorings,
    enumerate_family,
)
from .tensors import FULL_RANGE, RangeSpec, SparseTensor, lie_derivation, rotation_generator

__all__ = [
    "SubgroupDescriptor",
    "parse_descriptor",
    "generator_family",
    "fix_family",
    "sn_average_oracle",
    "so_invariance_check",
    "XI_SECOND",
]

VARIANTS = {
    "on+": "FreeOrth",
    "on": "ClassOrth",
    "sn": "SymGroup",
    "stab": "StabXi",
    "coordstab": "CoordStab",
    "fp": "FreeProdBlocks",
    "un": "UnitaryClass",
    "ufp": "UnitaryFreeProd",
}
_TAGS = {v: k for k, v in VARIANTS.items()}

# default second stabilizer direction: exact unit vector independent from e_1
XI_SECOND = (Fraction(3, 5), Fraction(4, 5))


@dataclass(frozen=True)
class SubgroupDescriptor:
    variant: str
    N: int
    xi: Optional[tuple[Fraction, ...]] = None
    B: Optional[tuple[int, ...]] = None
    a: Optional[int] = None
    b: Optional[int] = None

    def __post_init__(self):
        if self.variant not in _TAGS:
            raise ParameterError(f"unknown subgroup variant {self.variant!r}")
        if self.N < 1:
            raise ParameterError(f"N must be positive, got {self.N}")
        if self.variant == "StabXi":
            if self.xi is None or len(self.xi) != self.N:
                raise ParameterError(f"stabilizer vector must have {self.N} coordinates")
            object.__setattr__(self, "xi", tuple(Fraction(x) for x in self.xi))
            if sum(x * x for x in self.xi) != 1:
                raise ParameterError(f"stabilizer vector {self.xi_text()} is not a unit vector")
        if self.variant == "CoordStab":
            if not self.B:
                raise ParameterError("coordinate block B must be nonempty")
            B = tuple(sorted(set(self.B)))
            if any(not 1 <= i <= self.N for i in B):
                raise ParameterError(f"B={B} outside 1..{self.N}")
            if len(B) == self.N:
                raise ParameterError("B must be a proper subset of 1..N")
            object.__setattr__(self, "B", B)
        if self.variant in ("FreeProdBlocks", "UnitaryFreeProd"):
            if self.a is None or self.b is None or self.a < 1 or self.b < 1:
                raise ParameterError("free product blocks need a, b >= 1")
            if self.a + self.b != self.N:
                raise ParameterError(f"a + b = {self.a + self.b} != N = {self.N}")

    @property
    def tag(self) -> str:
        return _TAGS[self.variant]

    @property
    def is_unitary(self) -> bool:
        return self.variant in ("UnitaryClass", "UnitaryFreeProd")

    def xi_text(self) -> str:
        nz = [i for i, x in enumerate(self.xi) if x != 0]
        if len(nz) == 1 and self.xi[nz[0]] == 1:
            return f"e{nz[0] + 1}"
        return ",".join(str(x) for x in self.xi)

    def __str__(self):
        s = f"{self.tag}:N={self.N}"
        if self.variant == "StabXi":
            s += f",xi={self.xi_text()}"
        elif self.variant == "CoordStab":
            B = self.B
            if B == tuple(range(B[0], B[-1] + 1)):
                s += f",B={B[0]}-{B[-1]}"
            else:
                s += ",B=" + ",".join(map(str, B))
        elif self.variant in ("FreeProdBlocks", "UnitaryFreeProd"):
            s += f",a={self.a},b={self.b}"
        return s

    def to_dict(self) -> dict:
        return {"descriptor": str(self), "variant": self.variant, "N": self.N}


def parse_descriptor(text: str) -> SubgroupDescriptor:
    """Parse the CLI grammar, e.g. "on+:N=4", "stab:N=4,xi=3/5,4/5,0,0", "coordstab:N=5,B=1-3"."""
    m = re.fullmatch(r"\s*([a-z+]+)\s*:\s*(.*?)\s*", text)
    if not m or m.group(1) not in VARIANTS:
        raise ParameterError(f"cannot parse descriptor {text!r}")
    variant = VARIANTS[m.group(1)]
    params: dict[str, list[str]] = {}
    key = None
    for tok in m.group(2).split(","):
        tok = tok.strip()
        if "=" in tok:
            key, val = (s.strip() for s in tok.split("=", 1))
            params[key] = [val]
        elif key is not None and tok:
            params[key].append(tok)
        else:
            raise ParameterError(f"cannot parse descriptor {text!r}")
    try:
        N = int(_one(params, "N"))
        kw: dict = {}
        if variant == "StabXi":
            vals = params.get("xi")
            if not vals:
                raise ParameterError("stab descriptor needs xi=")
            if len(vals) == 1 and re.fullmatch(r"e\d+", vals[0]):
                i = int(vals[0][1:])
                if not 1 <= i <= N:
                    raise ParameterError(f"basis vector {vals[0]} outside 1..{N}")
                kw["xi"] = tuple(Fraction(int(j == i)) for j in range(1, N + 1))
            else:
                kw["xi"] = tuple(Fraction(v) for v in vals)
        elif variant == "CoordStab":
            B: list[int] = []
            for v in params.get("B", []):
                if "-" in v:
                    lo, hi = (int(x) for x in v.split("-"))
                    B.extend(range(lo, hi + 1))
                else:
                    B.append(int(v))
            kw["B"] = tuple(B)
        elif variant in ("FreeProdBlocks", "UnitaryFreeProd"):
            kw["a"] = int(_one(params, "a"))
            kw["b"] = int(_one(params, "b"))
        extra = set(params) - {"N", "xi", "B", "a", "b"}
        if extra:
            raise ParameterError(f"unknown descriptor keys {sorted(extra)}")
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"cannot parse descriptor {text!r}: {exc}") from None
    return SubgroupDescriptor(variant, N, **kw)


def _one(params, key):
    vals = params.get(key)
    if not vals or len(vals) != 1:
        raise ParameterError(f"descriptor needs exactly one value for {key}")
    return vals[0]


# ------------------------------------------------------------------ families

def _power(v: SparseTensor, s: int) -> SparseTensor:
    out = SparseTensor(v.dim, 0, {0: 1})
    for _ in range(s):
        out = out.kron(v)
    return out


def _scalar_members(partitions, N, rng=FULL_RANGE, closed=False):
    one = SparseTensor(N, 0, {0: 1})
    return [Member(p.encode(), partition=p, inp=one, rng=rng, closed=closed) for p in partitions]


def generator_family(d: SubgroupDescriptor, N: Optional[int] = None, k: int = 0) -> GeneratorFamily:
    """Ordered spanning family of Fix_k for the subgroup `d` acting on (R^N)^{⊗k}."""
    if N is None:
        N = d.N
    if N != d.N:
        raise ParameterError(f"descriptor is for N={d.N}, asked for N={N}")
    if k < 0:
        raise ParameterError(f"negative degree {k}")
    v = d.variant
    if v == "FreeOrth":
        members = _scalar_members(enumerate_family(NC2, k), N)
    elif v == "ClassOrth":
        members = _scalar_members(enumerate_family(P2, k), N)
    elif v == "SymGroup":
        members = _scalar_members(enumerate_family(SET_PARTITIONS, k), N, closed=True)
    elif v == "UnitaryClass":
        members = _scalar_members(enumerate_family(EVENODD_ALL, k), N)
    elif v == "StabXi":
        xi = SparseTensor(N, 1, {i: x for i, x in enumerate(d.xi)})
        powers: dict[int, SparseTensor] = {}
        members = []
        for p in enumerate_family(NC21, k):
            s = len(p.singletons)
            if s not in powers:
                powers[s] = _power(xi, s)
            label = p.encode() + (f" ξ^{s}" if s else "")
            members.append(Member(label, partition=p, inp=powers[s]))
    elif v == "CoordStab":
        rest = [i for i in range(1, N + 1) if i not in d.B]
        rng = RangeSpec(default_range=d.B)
        members = []
        for p in enumerate_family(NC21, k):
            s = len(p.singletons)
            for fill in itertools.product(rest, repeat=s):
                inp = SparseTensor.from_indices(N, s, {fill: 1})
                label = p.encode() + (" [" + ",".join(f"e{j}" for j in fill) + "]" if s else "")
                members.append(Member(label, partition=p, inp=inp, rng=rng))
    elif v in ("FreeProdBlocks", "UnitaryFreeProd"):
        kind = NC2 if v == "FreeProdBlocks" else EVENODD_NC
        rng = RangeSpec(per_color_range={1: tuple(range(1, d.a + 1)), 2: tuple(range(d.a + 1, N + 1))})
        colored = [c for p in enumerate_family(kind, k) for c in colorings(p, 2)]
        members = _scalar_members(colored, N, rng)
    else:  # pragma: no cover
        raise ParameterError(f"unhandled variant {v}")
    return GeneratorFamily(d, N, k, members)


def fix_family(N: int, k: int, unitary: bool = False) -> GeneratorFamily:
    """The spanning family of Fix_k for O_N^+ (or U_N^+ in the even-odd picture)."""
    if unitary:
        return GeneratorFamily(f"un+:N={N}", N, k, _scalar_members(enumerate_family(EVENODD_NC, k), N))
    return generator_family(SubgroupDescriptor("FreeOrth", N), N, k)


# ------------------------------------------------------------------- oracles

DEFAULT_SN_BUDGET = math.factorial(4) * 4 ** 6


def sn_average_oracle(N: int, k: int, budget: int = DEFAULT_SN_BUDGET) -> RationalMatrix:
    """(1/N!) Σ_σ σ^{⊗k} over all permutation matrices σ of R^N."""
    cost = math.factorial(N) * N ** k
    if cost > budget:
        raise ResourceError(f"S_N averaging needs N!·N^k = {cost} > budget {budget}")
    D = N ** k
    keys = np.arange(D, dtype=np.int64)
    digits = [(keys // N ** (k - 1 - j)) % N for j in range(k)]
    counts = np.zeros((D, D), dtype=np.int64)
    for perm in itertools.permutations(range(N)):
        sigma = np.array(perm, dtype=np.int64)
        image = np.zeros(D, dtype=np.int64)
        for j in range(k):
            image += sigma[digits[j]] * N ** (k - 1 - j)
        np.add.at(counts, (image, keys), 1)
    den = math.factorial(N)
    g = math.gcd(den, *(int(x) for x in np.unique(counts)))
    num = np.array((counts // g).tolist(), dtype=object).reshape(D, D)
    return RationalMatrix(num, den // g)


def so_invariance_check(
    fam: GeneratorFamily,
    block_split: Optional[tuple[int, int]] = None,
    coords: Optional[Sequence[int]] = None,
) -> bool:
    """Every member is killed by every rotation generator E_ij - E_ji.

    Generators span so(N) by default, so(a) ⊕ so(b) for a block split, or
    so(|coords|) acting on the given coordinates only.
    """
    N = fam.N
    if block_split is not None:
        a, b = block_split
        if a + b != N:
            raise ParameterError(f"block split {block_split} does not sum to N={N}")
        groups = [range(1, a + 1), range(a + 1, N + 1)]
    elif coords is not None:
        groups = [sorted(coords)]
    else:
        groups = [range(1, N + 1)]
    gens = [rotation_generator(N, i, j) for g in groups for i, j in itertools.combinations(g, 2)]
    return all(lie_derivation(X, v).is_zero() for v in fam.members for X in gens)
