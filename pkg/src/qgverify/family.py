"""Ordered spanning families of tensors, built lazily from partition recipes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .errors import ParameterError
from .partitions import Partition
from .tensors import FULL_RANGE, RangeSpec, SparseTensor, apply_partition


@dataclass(frozen=True)
class Member:
    """One family member: T_p(inp) over `rng`, or an explicit tensor."""

    label: str
    partition: Optional[Partition] = None
    inp: Optional[SparseTensor] = None
    rng: RangeSpec = FULL_RANGE
    tensor: Optional[SparseTensor] = None
    # singleton blocks are closed strings (set-partition tensors), not input legs
    closed: bool = False

    @property
    def pure(self) -> bool:
        """True for a plain full-range T_p of an uncolored partition without singletons."""
        p = self.partition
        return (
            self.tensor is None
            and p is not None
            and not p.is_colored
            and (self.closed or not p.singletons)
            and self.rng.is_full
        )

    def build(self, N: int) -> SparseTensor:
        if self.tensor is not None:
            return self.tensor
        return apply_partition(self.partition, N, self.inp, self.rng, open_singletons=not self.closed)


class GeneratorFamily:
    """A spanning set of a fixed-point space, with the descriptor that produced it."""

    def __init__(self, descriptor, N: int, k: int, recipes: Sequence[Member]):
        self.descriptor = descriptor
        self.N = N
        self.k = k
        self.recipes = tuple(recipes)

    @classmethod
    def from_vectors(cls, vectors: Sequence[SparseTensor], labels=None, descriptor="synthetic"):
        if not vectors:
            raise ParameterError("need at least one vector")
        N, k = vectors[0].shape
        if any(v.shape != (N, k) for v in vectors):
            raise ParameterError("vectors have different shapes")
        labels = labels or [f"v{i}" for i in range(len(vectors))]
        return cls(descriptor, N, k, [Member(lab, tensor=v) for lab, v in zip(labels, vectors)])

    def __len__(self):
        return len(self.recipes)

    def __repr__(self):
        return f"GeneratorFamily({self.descriptor}, N={self.N}, k={self.k}, size={len(self)})"

    @property
    def shape(self):
        return (self.N, self.k)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.recipes]

    @property
    def all_pure(self) -> bool:
        return all(m.pure for m in self.recipes)

    @cached_property
    def members(self) -> tuple[SparseTensor, ...]:
        return tuple(m.build(self.N) for m in self.recipes)

    def concat(self, other: "GeneratorFamily") -> "GeneratorFamily":
        if self.shape != other.shape:
            raise ParameterError(f"family shapes differ: {self.shape} vs {other.shape}")
        fam = GeneratorFamily(f"{self.descriptor} ∪ {other.descriptor}", self.N, self.k,
                              self.recipes + other.recipes)
        # reuse tensors already built on either side
        if "members" in self.__dict__ and "members" in other.__dict__:
            fam.__dict__["members"] = self.members + other.members
        return fam

    def with_extra(self, v: SparseTensor, label: str = "extra") -> "GeneratorFamily":
        if v.shape != self.shape:
            raise ParameterError(f"vector shape {v.shape} != family shape {self.shape}")
        return self.concat(GeneratorFamily(self.descriptor, self.N, self.k, [Member(label, tensor=v)]))
