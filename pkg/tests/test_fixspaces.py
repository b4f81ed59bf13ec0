from fractions import Fraction

import pytest

from oracles import all_permutations, permutation_power
from qgverify.counting import motzkin, sn_fixed_dimension
from qgverify.errors import ParameterError, ResourceError
from qgverify.fixspaces import (
    fix_family,
    generator_family,
    parse_descriptor,
    sn_average_oracle,
    so_invariance_check,
)
from qgverify.family import GeneratorFamily
from qgverify.linalg import gram, intersection_ranks, rank
from qgverify.tensors import basis_vector


def fam(desc, k):
    return generator_family(parse_descriptor(desc), None, k)


# --- descriptors

@pytest.mark.parametrize("text", ["on+:N=4", "on:N=4", "sn:N=4", "stab:N=4,xi=e1", "stab:N=4,xi=3/5,4/5,0,0",
                                  "coordstab:N=5,B=1-3", "fp:N=4,a=2,b=2", "un:N=4", "ufp:N=4,a=2,b=2"])
def test_descriptor_roundtrip(text):
    d = parse_descriptor(text)
    assert str(d) == text
    assert parse_descriptor(str(d)) == d


def test_descriptor_variants():
    assert parse_descriptor("on+:N=3").variant == "FreeOrth"
    assert parse_descriptor("on:N=3").variant == "ClassOrth"
    assert parse_descriptor("coordstab:N=5,B=1,3").B == (1, 3)


@pytest.mark.parametrize("text", [
    "stab:N=3,xi=1,1,0",        # not unit
    "stab:N=3,xi=e4",
    "stab:N=3,xi=1,0",          # wrong length
    "coordstab:N=3,B=1-3",      # not proper
    "coordstab:N=3",
    "fp:N=4,a=1,b=2",
    "fp:N=4,a=0,b=4",
    "xx:N=4",
    "on:N=4,q=2",
    "on:N=abc",
    "on",
])
def test_descriptor_errors(text):
    with pytest.raises(ParameterError):
        parse_descriptor(text)


# --- families

def test_free_orth_family():
    F = fam("on+:N=2", 4)
    assert len(F) == 2 and F.labels == ["12|34", "14|23"]


def test_stab_family_k2():
    F = fam("stab:N=3,xi=e1", 2)
    got = dict(zip(F.labels, (m.as_dict() for m in F.members)))
    assert got == {
        "12": {(1, 1): 1, (2, 2): 1, (3, 3): 1},
        "1|2 ξ^2": {(1, 1): 1},
    }


def test_free_product_family_k2():
    F = fam("fp:N=4,a=2,b=2", 2)
    assert [m.as_dict() for m in F.members] == [
        {(1, 1): 1, (2, 2): 1},
        {(3, 3): 1, (4, 4): 1},
    ]


def test_sn_family_k2():
    F = fam("sn:N=2", 2)
    ones = {(i, j): 1 for i in (1, 2) for j in (1, 2)}
    assert sorted(map(str, (m.as_dict() for m in F.members))) == sorted(map(str, [{(1, 1): 1, (2, 2): 1}, ones]))
    assert rank(gram(F)).rank == 2


def test_general_xi_family_uses_powers():
    F = fam("stab:N=2,xi=3/5,4/5", 1)
    assert F.members[0].as_dict() == {(1,): Fraction(3, 5), (2,): Fraction(4, 5)}


def test_family_shapes():
    for desc in ("on:N=3", "sn:N=3", "stab:N=3,xi=e2", "coordstab:N=3,B=2", "fp:N=3,a=1,b=2", "ufp:N=3,a=1,b=2"):
        F = fam(desc, 4)
        assert len(F.members) == len(F.labels)
        assert all(m.shape == (3, 4) for m in F.members)


def test_family_rejects_mismatched_n():
    with pytest.raises(ParameterError):
        generator_family(parse_descriptor("on:N=3"), 4, 2)


# --- classical ranks

def test_brauer_rank_at_n2():
    assert rank(gram(fam("on:N=2", 4))).rank == 3


@pytest.mark.parametrize("N", [3, 4])
@pytest.mark.parametrize("k", range(0, 9))
def test_stab_family_is_independent(N, k):
    assert rank(gram(fam(f"stab:N={N},xi=e1", k))).rank == motzkin(k)


@pytest.mark.parametrize("N,j", [(3, 1), (4, 2)])
@pytest.mark.parametrize("k", range(0, 6))
def test_stab_basis_vector_matches_coordstab(N, j, k):
    # full-range form vs pairs over the complement with e_j in the singletons
    rest = [i for i in range(1, N + 1) if i != j]
    A = fam(f"stab:N={N},xi=e{j}", k)
    B = fam(f"coordstab:N={N},B=" + ",".join(map(str, rest)), k)
    rA, rB, rU = intersection_ranks(A, B)
    assert rA.rank == rB.rank == rU.rank


# --- S_N averaging oracle

def test_sn_oracle_examples():
    assert sn_average_oracle(2, 1).tolist() == [[Fraction(1, 2)] * 2] * 2
    R = sn_average_oracle(2, 2)
    assert R.trace() == 2 and rank(R.num.tolist()).rank == 2
    assert sn_average_oracle(3, 0).tolist() == [[1]]


def test_sn_oracle_budget():
    with pytest.raises(ResourceError):
        sn_average_oracle(5, 6)


def test_sn_oracle_matches_permutation_average():
    N, k = 3, 2
    D = N ** k
    want = [[Fraction(0)] * D for _ in range(D)]
    perms = all_permutations(N)
    for perm in perms:
        for a, b in permutation_power(perm, N, k).items():
            want[b][a] += Fraction(1, len(perms))
    assert sn_average_oracle(N, k).tolist() == want


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("k", range(0, 5))
def test_sn_family_spans_oracle_range(N, k):
    F = fam(f"sn:N={N}", k)
    R = sn_average_oracle(N, k)
    assert R.is_idempotent() and R.is_symmetric()
    assert all(R.fixes(v) for v in F.members)
    r = rank(gram(F)).rank
    assert r == rank(R.num.tolist()).rank == R.trace() == sn_fixed_dimension(N, k)


# --- Lie-algebra invariance

def test_so_invariance_examples():
    assert so_invariance_check(fam("on:N=3", 4))
    assert not so_invariance_check(GeneratorFamily.from_vectors([basis_vector(2, 1)]))
    assert so_invariance_check(fam("fp:N=4,a=2,b=2", 4), block_split=(2, 2))


def test_so_invariance_of_stabilizer_on_complement():
    assert so_invariance_check(fam("stab:N=4,xi=e1", 4), coords=[2, 3, 4])
    assert not so_invariance_check(fam("stab:N=4,xi=e1", 2))


def test_so_invariance_of_set_partitions_fails_for_so():
    # S_N-invariants are not O(N)-invariant in general
    assert not so_invariance_check(fam("sn:N=3", 1))


def test_block_split_must_sum_to_n():
    with pytest.raises(ParameterError):
        so_invariance_check(fam("fp:N=4,a=2,b=2", 2), block_split=(1, 2))


def test_fix_family_unitary_picture():
    assert len(fix_family(4, 6, unitary=True)) == 5
    assert len(fix_family(4, 5, unitary=True)) == 0
