"""Exact sparse vectors in (R^N)^{⊗k} and the diagram tensors built from partitions.

Coefficients are Python ints or `fractions.Fraction`; integral fractions are
stored as ints so that the common all-integer families stay cheap.  Entries
are keyed by the mixed-radix code of the (1-based) index tuple, first leg most
significant, and kept in ascending key order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Optional, Sequence

from .errors import ParameterError
from .partitions import Partition

__all__ = [
    "SparseTensor",
    "RangeSpec",
    "basis_vector",
    "vector",
    "tensor_of_partition",
    "apply_partition",
    "sym_tensor",
    "inner_product",
    "lie_derivation",
    "rotation_generator",
]


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    if isinstance(c, bool) or not isinstance(c, Rational):
        raise ParameterError(f"coefficient {c!r} is not an exact rational")
    return c


class SparseTensor:
    """An exact vector of degree `legs` over the local space R^dim."""

    __slots__ = ("dim", "legs", "entries")

    def __init__(self, dim: int, legs: int, entries: Optional[Mapping[int, object]] = None):
        if dim < 1 or legs < 0:
            raise ParameterError(f"bad shape dim={dim}, legs={legs}")
        self.dim = dim
        self.legs = legs
        size = dim ** legs
        clean = {}
        for key, c in (entries or {}).items():
            if not 0 <= key < size:
                raise ParameterError(f"key {key} outside (R^{dim})^⊗{legs}")
            c = _norm(c)
            if c != 0:
                clean[key] = c
        self.entries = dict(sorted(clean.items()))

    @classmethod
    def _raw(cls, dim, legs, entries):
        # entries already normalized, nonzero and sorted
        obj = object.__new__(cls)
        obj.dim, obj.legs, obj.entries = dim, legs, entries
        return obj

    @classmethod
    def from_indices(cls, dim: int, legs: int, items: Mapping[tuple, object]) -> "SparseTensor":
        acc: dict[int, object] = {}
        for idx, c in items.items():
            if len(idx) != legs:
                raise ParameterError(f"index {idx} has wrong length for degree {legs}")
            key = cls._encode(dim, idx)
            acc[key] = acc.get(key, 0) + c
        return cls(dim, legs, acc)

    @staticmethod
    def _encode(dim, idx):
        key = 0
        for i in idx:
            if not 1 <= i <= dim:
                raise ParameterError(f"index {i} outside 1..{dim}")
            key = key * dim + (i - 1)
        return key

    def decode(self, key: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.legs):
            key, r = divmod(key, self.dim)
            out.append(r + 1)
        return tuple(reversed(out))

    def items(self):
        """(index tuple, coefficient) pairs in ascending order."""
        for key, c in self.entries.items():
            yield self.decode(key), c

    def as_dict(self) -> dict[tuple[int, ...], object]:
        return dict(self.items())

    @property
    def shape(self):
        return (self.dim, self.legs)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def _check(self, other: "SparseTensor"):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        if self.shape != other.shape:
            raise ParameterError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.entries)
        for key, c in other.entries.items():
            acc[key] = acc.get(key, 0) + c
        return SparseTensor(self.dim, self.legs, acc)

    def __neg__(self):
        return SparseTensor._raw(self.dim, self.legs, {k: -c for k, c in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = _norm(scalar)
        if scalar == 0:
            return SparseTensor(self.dim, self.legs)
        return SparseTensor._raw(self.dim, self.legs, {k: _norm(c * scalar) for k, c in self.entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.dim, self.legs, tuple(self.entries.items())))

    def __repr__(self):
        terms = ", ".join(f"{idx}: {c}" for idx, c in itertools.islice(self.items(), 6))
        more = ", ..." if self.nnz > 6 else ""
        return f"SparseTensor(N={self.dim}, k={self.legs}, {{{terms}{more}}})"

    def kron(self, other: "SparseTensor") -> "SparseTensor":
        if self.dim != other.dim:
            raise ParameterError("kron needs equal local dimension")
        shift = self.dim ** other.legs
        out = {}
        for a, ca in self.entries.items():
            base = a * shift
            for b, cb in other.entries.items():
                out[base + b] = _norm(ca * cb)
        return SparseTensor._raw(self.dim, self.legs + other.legs, out)

    def to_dense(self) -> list:
        dense = [0] * (self.dim ** self.legs)
        for key, c in self.entries.items():
            dense[key] = c
        return dense


def basis_vector(N: int, i: int) -> SparseTensor:
    """The standard basis vector e_i of R^N (1-based)."""
    if not 1 <= i <= N:
        raise ParameterError(f"basis index {i} outside 1..{N}")
    return SparseTensor._raw(N, 1, {i - 1: 1})


def vector(coords: Sequence) -> SparseTensor:
    """A degree-1 tensor from a coordinate list."""
    return SparseTensor(len(coords), 1, {i: c for i, c in enumerate(coords)})


def _scalar(N):
    return SparseTensor._raw(N, 0, {0: 1})


@dataclass(frozen=True)
class RangeSpec:
    """Index ranges for the strings of a diagram.

    `default_range` applies to uncolored blocks (None means all of 1..N);
    `per_color_range` maps a block color to its index subset.
    """

    default_range: Optional[tuple[int, ...]] = None
    per_color_range: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __hash__(self):
        return hash((self.default_range, tuple(sorted(self.per_color_range.items()))))

    def validate(self, N: int):
        subsets = list(self.per_color_range.values())
        if self.default_range is not None:
            subsets.append(self.default_range)
        for sub in subsets:
            if not sub:
                raise ParameterError("empty index range")
            if any(not 1 <= i <= N for i in sub):
                raise ParameterError(f"range {sub} outside 1..{N}")

    def for_block(self, color: Optional[int], N: int) -> tuple[int, ...]:
        if color is None:
            return tuple(range(1, N + 1)) if self.default_range is None else tuple(self.default_range)
        try:
            return tuple(self.per_color_range[color])
        except KeyError:
            raise ParameterError(f"no index range for color {color}") from None

    @property
    def is_full(self) -> bool:
        return self.default_range is None and not self.per_color_range


FULL_RANGE = RangeSpec()


def _string_terms(p: Partition, N: int, rng: RangeSpec, open_singletons: bool = True):
    """Key offsets contributed by the string blocks of p, as one flat list."""
    k = p.points
    keys = [0]
    for bi, block in enumerate(p.blocks):
        if len(block) == 1 and open_singletons:
            continue
        color = p.colors[bi] if p.colors is not None else None
        weight = sum(N ** (k - pos) for pos in block)
        offs = [(i - 1) * weight for i in rng.for_block(color, N)]
        keys = [a + b for a in keys for b in offs]
    return keys


def apply_partition(
    p: Partition,
    N: int,
    inp: SparseTensor,
    rng: RangeSpec = FULL_RANGE,
    open_singletons: bool = True,
) -> SparseTensor:
    """T_p applied to a degree-s input, s = number of singletons of p.

    Leg j of the input is placed at the j-th singleton (left to right); every
    other block is a string summing e_i ⊗ ... ⊗ e_i over its index range.
    With open_singletons=False singleton blocks are strings too (set-partition
    tensors) and the input must have degree 0.
    """
    sing = p.singletons if open_singletons else ()
    if inp.legs != len(sing):
        raise ParameterError(f"partition {p} has {len(sing)} singletons, input has degree {inp.legs}")
    if inp.dim != N:
        raise ParameterError(f"input dimension {inp.dim} != N={N}")
    rng.validate(N)
    k = p.points
    strings = _string_terms(p, N, rng, open_singletons)
    if not sing:
        c = inp.entries.get(0, 0)
        if c == 0:
            return SparseTensor(N, k)
        return SparseTensor._raw(N, k, {key: c for key in sorted(strings)})
    weights = [N ** (k - pos) for pos in sing]
    out = {}
    for idx, c in inp.items():
        base = sum((i - 1) * w for i, w in zip(idx, weights))
        for key in strings:
            out[base + key] = c
    return SparseTensor._raw(N, k, dict(sorted(out.items())))


def tensor_of_partition(
    p: Partition,
    N: int,
    singleton_args: Sequence[SparseTensor] = (),
    rng: RangeSpec = FULL_RANGE,
    open_singletons: bool = True,
) -> SparseTensor:
    """T_p(a_1 ⊗ ... ⊗ a_s) for degree-1 arguments placed at the singletons of p."""
    expected = len(p.singletons) if open_singletons else 0
    if len(singleton_args) != expected:
        raise ParameterError(
            f"partition {p} has {expected} open singletons, got {len(singleton_args)} arguments"
        )
    inp = _scalar(N)
    for a in singleton_args:
        if a.legs != 1:
            raise ParameterError("singleton arguments must have degree 1")
        if a.dim != N:
            raise ParameterError(f"argument dimension {a.dim} != N={N}")
        inp = inp.kron(a)
    return apply_partition(p, N, inp, rng, open_singletons)


def _multiset_permutations(seq):
    counts = {}
    for x in seq:
        counts[x] = counts.get(x, 0) + 1
    items = sorted(counts)
    n = len(seq)

    def rec(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for x in items:
            if counts[x]:
                counts[x] -= 1
                prefix.append(x)
                yield from rec(prefix)
                prefix.pop()
                counts[x] += 1

    return rec([])


def sym_tensor(args: Sequence[SparseTensor]) -> SparseTensor:
    """Σ over all l! orderings σ of a_{σ(1)} ⊗ ... ⊗ a_{σ(l)}, unnormalized."""
    if not args:
        raise ParameterError("sym_tensor needs at least one argument")
    N = args[0].dim
    if any(a.dim != N or a.legs != 1 for a in args):
        raise ParameterError("sym_tensor arguments must be degree-1 tensors of equal dimension")
    classes: list[SparseTensor] = []
    labels = []
    for a in args:
        if a not in classes:
            classes.append(a)
        labels.append(classes.index(a))
    mult = 1
    for c in range(len(classes)):
        for m in range(2, labels.count(c) + 1):
            mult *= m
    acc: dict[int, object] = {}
    for arrangement in _multiset_permutations(labels):
        t = _scalar(N)
        for c in arrangement:
            t = t.kron(classes[c])
        for key, v in t.entries.items():
            acc[key] = acc.get(key, 0) + v
    return SparseTensor(N, len(args), acc) * mult


def inner_product(x: SparseTensor, y: SparseTensor):
    """Σ_i x_i y_i over shared multi-indices (real coefficients)."""
    if x.shape != y.shape:
        raise ParameterError(f"shape mismatch {x.shape} vs {y.shape}")
    if len(x.entries) > len(y.entries):
        x, y = y, x
    ye = y.entries
    total = 0
    for key, c in x.entries.items():
        d = ye.get(key)
        if d is not None:
            total += c * d
    return _norm(total) if isinstance(total, Fraction) else total


def _check_matrix(X, N):
    if len(X) != N or any(len(row) != N for row in X):
        raise ParameterError(f"matrix must be {N}x{N}")


def lie_derivation(X: Sequence[Sequence], v: SparseTensor) -> SparseTensor:
    """Σ_r (1 ⊗ ... ⊗ X ⊗ ... ⊗ 1) v, X acting on leg r."""
    N, k = v.dim, v.legs
    _check_matrix(X, N)
    cols = [[(a, X[a][b]) for a in range(N) if X[a][b] != 0] for b in range(N)]
    acc: dict[int, object] = {}
    for key, c in v.entries.items():
        for r in range(k):
            w = N ** (k - 1 - r)
            digit = (key // w) % N
            rest = key - digit * w
            for a, x in cols[digit]:
                nk = rest + a * w
                acc[nk] = acc.get(nk, 0) + x * c
    return SparseTensor(N, k, acc)


def rotation_generator(N: int, i: int, j: int) -> list[list[int]]:
    """E_ij - E_ji as an N x N integer matrix (1-based i, j)."""
    if not (1 <= i <= N and 1 <= j <= N) or i == j:
        raise ParameterError(f"bad rotation plane ({i}, {j}) for N={N}")
    X = [[0] * N for _ in range(N)]
    X[i - 1][j - 1] = 1
    X[j - 1][i - 1] = -1
    return X
