"""Exact Gram matrices, certified ranks, span tests and rational projections.

Ranks come from two independent engines: elimination modulo random word-size
primes (numpy int64) and fraction-free Bareiss elimination over Python ints.
A rank that is full modulo some prime is already a proof of full rank over Q.
A deficient rank r is certified by exhibiting (columns - r) independent exact
integer kernel vectors, lifted from the modular kernels; Bareiss is the
fallback when the lift fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .errors import ParameterError, ResourceError
from .family import GeneratorFamily
from .partitions import join_block_count
from .primes import random_primes
from .tensors import SparseTensor

__all__ = [
    "GramMatrix",
    "RankResult",
    "RationalMatrix",
    "gram",
    "rank",
    "rank_mod_p",
    "bareiss_rank",
    "kernel_certificate",
    "intersection_ranks",
    "intersection_dimension",
    "intersection_basis",
    "span_contains",
    "projection_matrix",
    "projection_onto",
    "rref",
    "nullspace",
    "dump_matrix",
    "load_matrix",
]

# pure-partition Gram uses join counts below this size, sparse products above
FAST_PATH_MAX = 1500
DEFAULT_DENSE_LIMIT = 4096
_INT64_SAFE = 2 ** 62


@dataclass
class GramMatrix:
    """Symmetric matrix entries[i][j] = nums[i, j] / (scales[i] * scales[j])."""

    nums: np.ndarray
    scales: tuple[int, ...]
    provenance: str = ""

    @property
    def size(self) -> int:
        return self.nums.shape[0]

    @property
    def entries(self) -> list[list]:
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                v = Fraction(int(self.nums[i, j]), self.scales[i] * self.scales[j])
                row.append(v.numerator if v.denominator == 1 else v)
            out.append(row)
        return out

    def integer_matrix(self) -> np.ndarray:
        """Rank-equivalent integer matrix (rows and columns rescaled)."""
        return self.nums

    def submatrix(self, idx: Sequence[int], provenance: str = "") -> "GramMatrix":
        idx = list(idx)
        return GramMatrix(self.nums[np.ix_(idx, idx)], tuple(self.scales[i] for i in idx),
                          provenance or self.provenance)


@dataclass
class RankResult:
    rank: int
    method: str
    primes_used: list[int] = field(default_factory=list)
    certified: bool = False
    size: tuple[int, int] = (0, 0)
    modular_ranks: list[int] = field(default_factory=list)
    certificate: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "method": self.method,
            "primes_used": list(self.primes_used),
            "certified": self.certified,
            "certificate": self.certificate,
            "size": list(self.size),
        }


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        if isinstance(v, Fraction) and v.denominator != 1:
            d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _integerize(t: SparseTensor) -> tuple[dict, int]:
    s = _lcm_den(t.entries.values())
    if s == 1:
        return t.entries, 1
    return {k: int(c * s) for k, c in t.entries.items()}, s


def gram(family: GeneratorFamily) -> GramMatrix:
    """Pairwise inner products of the family members."""
    n = len(family)
    if n == 0:
        raise ParameterError("Gram matrix of an empty family")
    prov = f"{family.descriptor} N={family.N} k={family.k}"
    if family.all_pure and n <= FAST_PATH_MAX:
        parts = [m.partition for m in family.recipes]
        N = family.N
        nums = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(i, n):
                nums[i, j] = nums[j, i] = N ** join_block_count(parts[i], parts[j])
        return GramMatrix(_shrink(nums), (1,) * n, prov)
    return _sparse_gram(family.members, prov)


def _sparse_gram(members: Sequence[SparseTensor], prov: str) -> GramMatrix:
    ints, scales = zip(*(_integerize(t) for t in members))
    n = len(members)
    dim = members[0].dim ** members[0].legs
    bound = max(sum(c * c for c in e.values()) for e in ints)
    if bound < _INT64_SAFE:
        rows, cols, vals = [], [], []
        for i, e in enumerate(ints):
            rows.extend([i] * len(e))
            cols.extend(e.keys())
            vals.extend(e.values())
        # column count can exceed int32; keep keys as int64
        V = sp.csr_matrix((np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64),
                                                             np.array(cols, dtype=np.int64))),
                          shape=(n, dim))
        G = (V @ V.T).toarray().astype(np.int64)
        return GramMatrix(G, tuple(scales), prov)
    nums = np.empty((n, n), dtype=object)
    for i in range(n):
        a = ints[i]
        for j in range(i, n):
            b = ints[j]
            x, y = (a, b) if len(a) <= len(b) else (b, a)
            nums[i, j] = nums[j, i] = sum(c * y[key] for key, c in x.items() if key in y)
    return GramMatrix(nums, tuple(scales), prov)


def _shrink(nums: np.ndarray) -> np.ndarray:
    """Store as int64 when every entry fits, else keep Python ints."""
    if nums.size == 0:
        return nums.astype(np.int64)
    if max(abs(int(x)) for x in nums.flat) < _INT64_SAFE:
        return nums.astype(np.int64)
    return nums


# ---------------------------------------------------------------- ranks

Matrixish = Union[GramMatrix, np.ndarray, Sequence[Sequence]]


def _as_int_rows(M: Matrixish) -> np.ndarray:
    """Integer object matrix with the same rank as M (each row cleared of denominators)."""
    if isinstance(M, GramMatrix):
        A = M.nums
        return A if A.dtype == object else A.astype(object)
    rows = [list(r) for r in (M.tolist() if isinstance(M, np.ndarray) else M)]
    if not rows:
        return np.zeros((0, 0), dtype=object)
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != out.shape[1]:
            raise ParameterError("ragged matrix")
        vals = []
        for v in r:
            if isinstance(v, (float, np.floating)):
                raise ParameterError("floating point entries are not allowed in exact rank")
            vals.append(Fraction(int(v)) if isinstance(v, (np.integer,)) else Fraction(v))
        d = _lcm_den(vals)
        out[i, :] = [int(v * d) for v in vals]
    return out


def _reduce_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    if A.dtype == object:
        return np.array([[int(x) % p for x in row] for row in A], dtype=np.int64).reshape(A.shape)
    return np.mod(A.astype(np.int64), p)


def _echelon_mod_p(M: np.ndarray, p: int, reduced: bool = False) -> list[int]:
    """In-place row echelon form mod p (reduced: Gauss-Jordan); returns pivot columns."""
    n, m = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(m):
        if r == n:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        inv = pow(int(M[r, c]), -1, p)
        M[r, c:] = (M[r, c:] * inv) % p
        prow = M[r, c:]
        f = M[r + 1:, c]
        if f.any():
            M[r + 1:, c:] = (M[r + 1:, c:] - np.outer(f, prow) % p) % p
        if reduced and r:
            f = M[:r, c]
            if f.any():
                M[:r, c:] = (M[:r, c:] - np.outer(f, prow) % p) % p
        pivots.append(c)
        r += 1
    return pivots


def rank_mod_p(A: np.ndarray, p: int) -> int:
    """Rank of an integer matrix modulo the prime p (< 2**31)."""
    if A.size == 0:
        return 0
    return len(_echelon_mod_p(_reduce_mod_p(A, p), p))


def _rational_reconstruct(a: int, M: int):
    """n/d ≡ a (mod M) with |n|, d <= sqrt(M/2), or None."""
    bound = math.isqrt(M // 2)
    r0, r1 = M, a % M
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if math.gcd(r1, s1) != 1:
        return None
    return Fraction(r1, s1)


def kernel_certificate(A: np.ndarray, r: int, primes: Sequence[int], seed: int = 0,
                       max_primes: int = 24) -> Optional[list[list[int]]]:
    """Exact integer kernel vectors proving rank(A) <= r, or None.

    Kernel bases modulo several primes (sharing one pivot pattern) are combined
    by CRT and lifted by rational reconstruction; every lifted vector is then
    checked exactly against A.  The vectors are independent by construction
    (unit pattern on the free columns).
    """
    n, m = A.shape
    if m - r <= 0:
        return []
    exact = _obj(A)
    pool = list(primes)
    extra = random_primes(max_primes, seed + 7919)
    pool += [q for q in extra if q not in pool]
    pattern = None
    residues: list[np.ndarray] = []
    modulus = 1
    for p in pool[:max_primes]:
        M = _reduce_mod_p(A, p)
        piv = _echelon_mod_p(M, p, reduced=True)
        if len(piv) != r:
            continue
        if pattern is None:
            pattern = piv
        elif piv != pattern:
            continue
        free = [c for c in range(m) if c not in set(piv)]
        K = np.zeros((len(free), m), dtype=object)
        for t, f in enumerate(free):
            K[t, f] = 1
            for i, c in enumerate(piv):
                K[t, c] = (-int(M[i, f])) % p
        if not residues:
            combined = K
        else:
            prev = residues[-1]
            inv = pow(modulus, -1, p)
            combined = prev + modulus * (((K - prev) * inv) % p)
        modulus *= p
        residues.append(combined % modulus)
        vecs = _lift(residues[-1], modulus)
        if vecs is not None and all(not np.any(exact.dot(v)) for v in vecs):
            return [list(map(int, v)) for v in vecs]
    return None


def _lift(K: np.ndarray, modulus: int):
    out = []
    for row in K:
        fr = []
        for x in row:
            q = _rational_reconstruct(int(x), modulus)
            if q is None:
                return None
            fr.append(q)
        d = _lcm_den(fr)
        out.append(np.array([int(q * d) for q in fr], dtype=object))
    return out


def bareiss_rank(A: np.ndarray) -> int:
    """Exact rank by one-step fraction-free (Bareiss) elimination with row pivoting."""
    if A.size == 0:
        return 0
    M = np.array(A, dtype=object, copy=True)
    n, m = M.shape
    r, prev = 0, 1
    for c in range(m):
        if r == n:
            break
        nz = np.flatnonzero(M[r:, c] != 0)
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        p = M[r, c]
        if r + 1 < n and c + 1 < m:
            M[r + 1:, c + 1:] = (M[r + 1:, c + 1:] * p - np.outer(M[r + 1:, c], M[r, c + 1:])) // prev
        M[r + 1:, c] = 0
        prev = p
        r += 1
    return r


def rank(
    M: Matrixish,
    method: str = "auto",
    prime_count: int = 3,
    seed: int = 0,
    escalate: bool = True,
) -> RankResult:
    """Rank of a Gram matrix or raw exact matrix.

    method="modular": ranks modulo `prime_count` seeded random primes in
    (2^30, 2^31), result the maximum; certified only when that is full rank.
    method="fraction_free": Bareiss, always certified.
    method="auto": modular first; on disagreement between primes, or when
    `escalate` is set and the rank is not full, certify exactly (kernel
    certificate, else Bareiss).
    """
    if method not in ("auto", "modular", "fraction_free"):
        raise ParameterError(f"unknown rank method {method!r}")
    if prime_count < 2 and method != "fraction_free":
        raise ParameterError("modular rank needs at least two primes")
    if isinstance(M, GramMatrix):
        A = M.nums
    else:
        A = _as_int_rows(M)
    shape = tuple(A.shape) if A.ndim == 2 else (0, 0)
    if method == "fraction_free":
        return RankResult(bareiss_rank(_obj(A)), "fraction_free", [], True, shape, [], "bareiss")
    primes = random_primes(prime_count, seed)
    ranks = [rank_mod_p(A, p) for p in primes]
    r = max(ranks) if ranks else 0
    full = r == min(shape)
    agree = len(set(ranks)) <= 1
    if full:
        return RankResult(r, "modular", primes, True, shape, ranks, "full_rank_mod_p")
    if method == "auto" and (not agree or escalate):
        if agree:
            cert = kernel_certificate(A, r, primes, seed)
            if cert is not None and len(cert) == shape[1] - r:
                return RankResult(r, "modular", primes, True, shape, ranks, "exact_kernel")
        rb = bareiss_rank(_obj(A))
        return RankResult(rb, "fraction_free", primes, True, shape, ranks, "bareiss")
    return RankResult(r, "modular", primes, False, shape, ranks)


def _obj(A: np.ndarray) -> np.ndarray:
    if A.dtype == object:
        return A
    return np.array(A.tolist(), dtype=object).reshape(A.shape)


# ---------------------------------------------------- spans and intersections

def _check_same_shape(a: GeneratorFamily, b: GeneratorFamily):
    if a.shape != b.shape:
        raise ParameterError(f"family shapes differ: (N,k)={a.shape} vs {b.shape}")


def intersection_ranks(famA: GeneratorFamily, famB: GeneratorFamily, **rank_opts):
    """(rank A, rank B, rank A∪B) from one Gram matrix of the union."""
    _check_same_shape(famA, famB)
    if len(famA) == 0 or len(famB) == 0:
        empty = RankResult(0, "modular", [], True, (0, 0))
        other = famB if len(famA) == 0 else famA
        ro = rank(gram(other), **rank_opts) if len(other) else empty
        rA = empty if len(famA) == 0 else ro
        rB = empty if len(famB) == 0 else ro
        return rA, rB, ro
    union = famA.concat(famB)
    GU = gram(union)
    nA = len(famA)
    GA = GU.submatrix(range(nA))
    GB = GU.submatrix(range(nA, len(union)))
    return rank(GA, **rank_opts), rank(GB, **rank_opts), rank(GU, **rank_opts)


def intersection_dimension(famA: GeneratorFamily, famB: GeneratorFamily, **rank_opts) -> int:
    """dim span(A) ∩ span(B) = rank A + rank B - rank(A ∪ B)."""
    rA, rB, rU = intersection_ranks(famA, famB, **rank_opts)
    return rA.rank + rB.rank - rU.rank


def span_contains(family: GeneratorFamily, v: SparseTensor, **rank_opts) -> bool:
    if v.shape != family.shape:
        raise ParameterError(f"vector shape {v.shape} != family shape {family.shape}")
    ext = family.with_extra(v)
    G = gram(ext)
    n = len(family)
    r0 = rank(G.submatrix(range(n)), **rank_opts).rank if n else 0
    r1 = rank(G, **rank_opts).rank
    return r0 == r1


# ------------------------------------------------------ exact dense helpers

def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return [], []
    n, m = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(m):
        if r == n:
            break
        piv = next((i for i in range(r, n) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} over Q."""
    if not rows:
        return []
    m = len(rows[0])
    R, piv = rref(rows)
    free = [c for c in range(m) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * m
        x[f] = Fraction(1)
        for i, c in enumerate(piv):
            x[c] = -R[i][f]
        basis.append(x)
    return basis


@dataclass
class RationalMatrix:
    """Dense exact matrix num / den with Python-int numerators."""

    num: np.ndarray
    den: int

    @property
    def shape(self):
        return self.num.shape

    def __getitem__(self, ij) -> Fraction:
        return Fraction(int(self.num[ij]), self.den)

    def tolist(self) -> list[list[Fraction]]:
        return [[Fraction(int(x), self.den) for x in row] for row in self.num]

    def to_float(self) -> np.ndarray:
        return np.array([[int(x) / self.den for x in row] for row in self.num], dtype=np.float64)

    def trace(self) -> Fraction:
        return Fraction(int(sum(self.num[i, i] for i in range(self.num.shape[0]))), self.den)

    def is_symmetric(self) -> bool:
        return bool(np.all(self.num == self.num.T))

    def is_idempotent(self) -> bool:
        return bool(np.all(self.num.dot(self.num) == self.num * self.den))

    def apply(self, v: SparseTensor) -> list[Fraction]:
        x = np.zeros(self.num.shape[1], dtype=object)
        for key, c in v.entries.items():
            x[key] = Fraction(c)
        y = self.num.dot(x)
        return [Fraction(yi) / self.den for yi in y]

    def fixes(self, v: SparseTensor) -> bool:
        dense = [Fraction(c) for c in v.to_dense()]
        return self.apply(v) == dense


def _independent_subset(vectors: Sequence[SparseTensor]) -> list[SparseTensor]:
    G = _sparse_gram(vectors, "").nums
    _, piv = rref(G.tolist())
    return [vectors[i] for i in piv]


def projection_onto(vectors: Sequence[SparseTensor], dense_limit: int = DEFAULT_DENSE_LIMIT) -> RationalMatrix:
    """Orthogonal projection onto span(vectors), exactly: V^T (V V^T)^{-1} V."""
    if not vectors:
        raise ParameterError("projection onto an empty family")
    N, k = vectors[0].shape
    D = N ** k
    if D > dense_limit:
        raise ResourceError(f"dense projection of size {D} exceeds limit {dense_limit}")
    basis = _independent_subset(vectors)
    r = len(basis)
    if r == 0:
        return RationalMatrix(np.zeros((D, D), dtype=object), 1)
    V = np.zeros((r, D), dtype=object)
    for i, t in enumerate(basis):
        ints, _ = _integerize(t)
        for key, c in ints.items():
            V[i, key] = c
    G = V.dot(V.T)
    # inverse of G as integer matrix / common denominator
    aug = [list(G[i]) + [1 if j == i else 0 for j in range(r)] for i in range(r)]
    R, _ = rref(aug)
    inv = [row[r:] for row in R]
    d = _lcm_den([x for row in inv for x in row])
    inv_num = np.array([[int(x * d) for x in row] for row in inv], dtype=object)
    P = V.T.dot(inv_num).dot(V)
    g = d
    for x in P.flat:
        if g == 1:
            break
        g = math.gcd(g, int(x))
    if g > 1:
        P = P // g
        d //= g
    return RationalMatrix(P, d)


def projection_matrix(family: GeneratorFamily, dense_limit: int = DEFAULT_DENSE_LIMIT) -> RationalMatrix:
    if len(family) == 0:
        raise ParameterError("projection onto an empty family")
    if family.N ** family.k > dense_limit:
        raise ResourceError(f"dense projection of size {family.N ** family.k} exceeds limit {dense_limit}")
    return projection_onto(family.members, dense_limit)


def intersection_basis(famA: GeneratorFamily, famB: GeneratorFamily) -> list[SparseTensor]:
    """A basis of span(A) ∩ span(B), from the kernel of the union Gram matrix."""
    _check_same_shape(famA, famB)
    union = famA.concat(famB)
    G = gram(union)
    nA = len(famA)
    vecs = []
    zero = SparseTensor(famA.N, famA.k)
    for x in nullspace(G.entries):
        w = zero
        for coef, t in zip(x[:nA], famA.members):
            if coef != 0:
                w = w + t * coef
        if not w.is_zero():
            vecs.append(w)
    if not vecs:
        return []
    return _independent_subset(vecs)


# --------------------------------------------------------------- matrix dump

def dump_matrix(M: Union[GramMatrix, RationalMatrix, Sequence[Sequence]], fh: IO[str], provenance: str = ""):
    """Write nonzero entries as "i j numerator/denominator" lines (0-based), one header line."""
    if isinstance(M, GramMatrix):
        rows = M.entries
        provenance = provenance or M.provenance
    elif isinstance(M, RationalMatrix):
        rows = M.tolist()
    else:
        rows = [list(r) for r in M]
    n = len(rows)
    m = len(rows[0]) if rows else 0
    fh.write(f"qgv-matrix v1 {n} {m} {provenance}".rstrip() + "\n")
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            v = Fraction(v)
            if v != 0:
                fh.write(f"{i} {j} {v.numerator}/{v.denominator}\n")


def load_matrix(fh: IO[str]) -> list[list[Fraction]]:
    header = fh.readline().split()
    if len(header) < 4 or header[:2] != ["qgv-matrix", "v1"]:
        raise ParameterError("not a qgv-matrix dump")
    n, m = int(header[2]), int(header[3])
    out = [[Fraction(0)] * m for _ in range(n)]
    for line in fh:
        if line.strip():
            i, j, v = line.split()
            out[int(i)][int(j)] = Fraction(v)
    return out
