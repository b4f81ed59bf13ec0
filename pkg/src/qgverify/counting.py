"""Closed forms and recursions for the family sizes (independent of enumeration)."""

from functools import lru_cache
from math import comb, factorial


@lru_cache(maxsize=None)
def catalan(m: int) -> int:
    if m < 0:
        return 0
    if m == 0:
        return 1
    return sum(catalan(i) * catalan(m - 1 - i) for i in range(m))


@lru_cache(maxsize=None)
def motzkin(k: int) -> int:
    # first point is a singleton, or pairs with point j+1 enclosing j-1 points
    if k <= 1:
        return 1
    return motzkin(k - 1) + sum(motzkin(j - 1) * motzkin(k - 1 - j) for j in range(1, k))


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def stirling2(n: int, j: int) -> int:
    if n == j:
        return 1
    if n == 0 or j == 0:
        return 0
    return j * stirling2(n - 1, j) + stirling2(n - 1, j - 1)


def bell(n: int) -> int:
    return sum(stirling2(n, j) for j in range(n + 1))


def nc21_s_count(k: int, s: int) -> int:
    """|NC_{2,1}^s(k)|: choose the singleton positions, pair the rest non-crossingly."""
    if s < 0 or s > k or (k - s) % 2:
        return 0
    return comb(k, s) * catalan((k - s) // 2)


def pairings_count(k: int) -> int:
    return double_factorial(k - 1) if k % 2 == 0 else 0


def evenodd_count(k: int) -> int:
    return factorial(k // 2) if k % 2 == 0 else 0


def sn_fixed_dimension(N: int, k: int) -> int:
    """dim of the S_N-invariants in (R^N)^{⊗k}: number of orbits on [N]^k."""
    return sum(stirling2(k, j) for j in range(min(N, k) + 1))
