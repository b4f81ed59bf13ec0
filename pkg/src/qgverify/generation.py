"""Degree-by-degree generation checks and the rank reports built on them."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from .config import RunConfig
from .counting import bell, catalan, motzkin, nc21_s_count, sn_fixed_dimension
from .errors import ParameterError
from .family import GeneratorFamily, Member
from .fixspaces import XI_SECOND, SubgroupDescriptor, fix_family, generator_family, parse_descriptor
from .linalg import FAST_PATH_MAX, RankResult, _integerize, gram, intersection_ranks, rank
from .partitions import NC21, enumerate_family, nc21_s
from .tensors import RangeSpec, SparseTensor, basis_vector, sym_tensor

__all__ = [
    "GenerationReport",
    "RankReport",
    "check_generation",
    "prop_diff_condition3",
    "prop_diff_conditions",
    "one_singleton_rank",
    "ygram_check",
    "stabilizer_triangularity_check",
    "triangularity_ranks",
]

GENERATED = "generated_at_k"
OBSTRUCTED = "obstructed_at_k"

Descriptorish = Union[str, SubgroupDescriptor]


@dataclass
class GenerationReport:
    a: str
    b: str
    N: int
    k: int
    dimA: int
    dimB: int
    dimIntersection: int
    dimFix: int
    verdict: str
    arithmetic: dict = field(default_factory=dict)
    elapsed: float = 0.0
    route: str = "gram"

    @property
    def generated(self) -> bool:
        return self.verdict == GENERATED

    @property
    def containment_ok(self) -> bool:
        return self.dimIntersection >= self.dimFix

    def to_dict(self) -> dict:
        d = asdict(self)
        d["containment_ok"] = self.containment_ok
        return d


@dataclass
class RankReport:
    label: str
    N: int
    k: int
    expected_count: int
    computed_rank: int
    full_rank: bool
    family_size: int = 0
    arithmetic: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _cfg(config: Optional[RunConfig]) -> RunConfig:
    return config if config is not None else RunConfig()


def _desc(d: Descriptorish) -> SubgroupDescriptor:
    return parse_descriptor(d) if isinstance(d, str) else d


def _arith(*results: RankResult) -> dict:
    primes = sorted({p for r in results for p in r.primes_used})
    certs = [r.certificate for r in results if r.size != (0, 0)]
    return {
        "primes": primes,
        "certified": all(r.certified for r in results),
        "certificates": certs,
        "methods": [r.method for r in results if r.size != (0, 0)],
    }


def _elapsed(t0: float, cfg: RunConfig) -> float:
    return round(time.perf_counter() - t0, 6) if cfg.record_timing else 0.0


# --------------------------------------------------------------- generation

def _rank_of(fam: GeneratorFamily, cfg: RunConfig) -> RankResult:
    if len(fam) == 0:
        return RankResult(0, "modular", [], True, (0, 0))
    return rank(gram(fam), **cfg.rank_opts)


def _permutation_defects(fam: GeneratorFamily, N: int, k: int) -> sp.csr_matrix:
    """Rows (b - g.b) for g in {(1 2), (1 2 ... N)}, stacked side by side."""
    gens = [np.array([1, 0] + list(range(2, N))), np.roll(np.arange(N), -1)]
    weights = N ** np.arange(k - 1, -1, -1, dtype=np.int64)
    rows, cols, vals = [], [], []
    D = N ** k
    for i, t in enumerate(fam.members):
        ints, _ = _integerize(t)
        keys = np.fromiter(ints.keys(), dtype=np.int64, count=len(ints))
        coef = np.fromiter(ints.values(), dtype=np.int64, count=len(ints))
        digits = (keys[:, None] // weights[None, :]) % N
        for gi, g in enumerate(gens):
            image = (g[digits] * weights[None, :]).sum(axis=1)
            off = gi * D
            rows += [i] * (2 * len(keys))
            cols += list(keys + off) + list(image + off)
            vals += list(coef) + list(-coef)
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(fam), 2 * D), dtype=np.int64)


def _sn_intersection(other: GeneratorFamily, N: int, k: int, cfg: RunConfig):
    """dim span(other) ∩ Fix(S_N) = rank(other) - rank of its S_N-defect vectors."""
    rB = _rank_of(other, cfg)
    if len(other) == 0:
        return rB, rB
    L = _permutation_defects(other, N, k)
    G = (L @ L.T).toarray()
    rL = rank(G, **cfg.rank_opts)
    return rB, rL


def check_generation(
    dA: Descriptorish,
    dB: Descriptorish,
    N: Optional[int] = None,
    k: int = 0,
    config: Optional[RunConfig] = None,
    route: str = "auto",
) -> GenerationReport:
    """Compare Fix_k(A) ∩ Fix_k(B) with Fix_k of the ambient free group.

    route="gram" always uses the union Gram matrix.  route="invariant" (only
    when one side is the symmetric group) replaces the set-partition family by
    the defining condition g.v = v for two generators of S_N; "auto" picks it
    when the set-partition family would exceed the dense Gram size.
    """
    cfg = _cfg(config)
    A, B = _desc(dA), _desc(dB)
    N = A.N if N is None else N
    if A.N != N or B.N != N:
        raise ParameterError(f"descriptors {A} and {B} are not both for N={N}")
    if k < 0:
        raise ParameterError(f"negative degree {k}")
    if route not in ("auto", "gram", "invariant"):
        raise ParameterError(f"unknown route {route!r}")
    t0 = time.perf_counter()
    sn_side = [d for d in (A, B) if d.variant == "SymGroup"]
    if route == "auto":
        route = "invariant" if sn_side and bell(k) > FAST_PATH_MAX else "gram"
    if route == "invariant" and not sn_side:
        raise ParameterError("the invariant route needs a symmetric-group descriptor")

    unitary = A.is_unitary or B.is_unitary
    F = fix_family(N, k, unitary=unitary)
    rF = _rank_of(F, cfg)
    if route == "gram":
        famA = generator_family(A, N, k)
        famB = generator_family(B, N, k)
        rA, rB, rU = intersection_ranks(famA, famB, **cfg.rank_opts)
        dimA, dimB = rA.rank, rB.rank
        dim_int = rA.rank + rB.rank - rU.rank
        arith = _arith(rA, rB, rU, rF)
    else:
        other = B if A.variant == "SymGroup" else A
        rO, rL = _sn_intersection(generator_family(other, N, k), N, k, cfg)
        dim_sn = sn_fixed_dimension(N, k)
        dim_int = rO.rank - rL.rank
        dimA, dimB = (dim_sn, rO.rank) if A.variant == "SymGroup" else (rO.rank, dim_sn)
        arith = _arith(rO, rL, rF)
    verdict = GENERATED if dim_int == rF.rank else OBSTRUCTED
    return GenerationReport(str(A), str(B), N, k, dimA, dimB, dim_int, rF.rank, verdict,
                            arith, _elapsed(t0, cfg), route)


# ------------------------------------------------------------- rank reports

def _rank_report(label, N, k, expected, fam: GeneratorFamily, cfg, t0) -> RankReport:
    r = _rank_of(fam, cfg)
    return RankReport(label, N, k, expected, r.rank, r.rank == expected, len(fam),
                      _arith(r), _elapsed(t0, cfg))


def prop_diff_condition3(N: int, k: int, config: Optional[RunConfig] = None) -> RankReport:
    """Rank of x_p = T_p(S(e1 ⊗ ... ⊗ e1 ⊗ e2)) over p in NC_{2,1}(k) with s >= 1."""
    if N < 3:
        raise ParameterError(f"condition (3) needs N >= 3, got N={N}")
    if k < 1:
        raise ParameterError(f"condition (3) needs k >= 1, got k={k}")
    cfg = _cfg(config)
    t0 = time.perf_counter()
    e1, e2 = basis_vector(N, 1), basis_vector(N, 2)
    inputs: dict[int, SparseTensor] = {}
    members = []
    for p in enumerate_family(NC21, k):
        s = len(p.singletons)
        if s == 0:
            continue
        if s not in inputs:
            inputs[s] = sym_tensor([e1] * (s - 1) + [e2])
        members.append(Member(p.encode(), partition=p, inp=inputs[s]))
    expected = motzkin(k) - (catalan(k // 2) if k % 2 == 0 else 0)
    fam = GeneratorFamily("x_p", N, k, members)
    return _rank_report("x_p = T_p(S(e1..e1 e2))", N, k, expected, fam, cfg, t0)


def prop_diff_conditions(N: int, k: int, config: Optional[RunConfig] = None) -> dict:
    """The three equivalent conditions, each decided by its own computation."""
    cfg = _cfg(config)
    xi2 = ",".join(str(x) for x in XI_SECOND + (0,) * (N - 2))
    c1 = check_generation(f"stab:N={N},xi=e1", f"stab:N={N},xi={xi2}", N, k, cfg)
    c2 = check_generation(f"on+:N={N}", f"stab:N={N},xi=e1", N, k, cfg)
    c3 = prop_diff_condition3(N, k, cfg)
    flags = [c1.generated, c2.generated, c3.full_rank]
    return {
        "N": N,
        "k": k,
        "condition1": c1.generated,
        "condition2": c2.generated,
        "condition3": c3.full_rank,
        "agree": len(set(flags)) == 1,
        "reports": [c1.to_dict(), c2.to_dict(), c3.to_dict()],
    }


def one_singleton_rank(N: int, k: int, config: Optional[RunConfig] = None) -> RankReport:
    """Rank of {T_p(e1) : p in NC_{2,1}(k) with exactly one singleton}; k odd."""
    if N < 2:
        raise ParameterError(f"needs N >= 2, got N={N}")
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"one-singleton family needs odd k, got k={k}")
    cfg = _cfg(config)
    t0 = time.perf_counter()
    e1 = basis_vector(N, 1)
    members = [Member(p.encode(), partition=p, inp=e1) for p in enumerate_family(nc21_s(1), k)]
    fam = GeneratorFamily("T_p(e1)", N, k, members)
    return _rank_report("T_p(e1), one singleton", N, k, k * catalan((k - 1) // 2), fam, cfg, t0)


def ygram_check(N: int, k: int, config: Optional[RunConfig] = None) -> RankReport:
    """Rank of y_{p,i} = T^3_p(e_{i1} ⊗ ... ⊗ e_{is}), pairs over {3..N}, i in {1,2}^s."""
    if N < 4:
        raise ParameterError(f"y-family needs N >= 4, got N={N}")
    if k < 0:
        raise ParameterError(f"negative degree {k}")
    cfg = _cfg(config)
    t0 = time.perf_counter()
    rng = RangeSpec(default_range=tuple(range(3, N + 1)))
    members = []
    for p in enumerate_family(NC21, k):
        s = len(p.singletons)
        for i in range(2 ** s):
            fill = tuple(1 + ((i >> (s - 1 - j)) & 1) for j in range(s))
            inp = SparseTensor.from_indices(N, s, {fill: 1})
            label = p.encode() + (" [" + ",".join(f"e{j}" for j in fill) + "]" if s else "")
            members.append(Member(label, partition=p, inp=inp, rng=rng))
    expected = sum(nc21_s_count(k, s) * 2 ** s for s in range(k + 1))
    fam = GeneratorFamily("y_{p,i}", N, k, members)
    return _rank_report("y_{p,i} = T^3_p(e_i)", N, k, expected, fam, cfg, t0)


def _stab_families(N: int, k: int):
    e1 = basis_vector(N, 1)
    inputs: dict[int, SparseTensor] = {}
    full, tail = [], []
    rng2 = RangeSpec(default_range=tuple(range(2, N + 1)))
    for p in enumerate_family(NC21, k):
        s = len(p.singletons)
        if s not in inputs:
            out = SparseTensor(N, 0, {0: 1})
            for _ in range(s):
                out = out.kron(e1)
            inputs[s] = out
        full.append(Member(p.encode(), partition=p, inp=inputs[s]))
        tail.append(Member(p.encode() + " (2..N)", partition=p, inp=inputs[s], rng=rng2))
    return GeneratorFamily("T^1", N, k, full), GeneratorFamily("T^2", N, k, tail)


def triangularity_ranks(N: int, k: int, config: Optional[RunConfig] = None) -> tuple[int, int, int]:
    """(rank T^1 family, rank T^2 family, rank of their union)."""
    if N < 3:
        raise ParameterError(f"needs N >= 3, got N={N}")
    cfg = _cfg(config)
    f1, f2 = _stab_families(N, k)
    r1, r2, ru = intersection_ranks(f1, f2, **cfg.rank_opts)
    return r1.rank, r2.rank, ru.rank


def stabilizer_triangularity_check(N: int, k: int, config: Optional[RunConfig] = None) -> bool:
    """True iff the full-range and {2..N}-range families span the same space."""
    r1, r2, ru = triangularity_ranks(N, k, config)
    return r1 == r2 == ru
