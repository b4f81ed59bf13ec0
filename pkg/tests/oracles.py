"""Slow, independent reference implementations used only by the tests."""

from fractions import Fraction
from itertools import permutations, product
from math import comb


def rgs_set_partitions(k):
    """All set partitions of {1..k} via restricted growth strings."""
    out = []

    def rec(prefix, m):
        if len(prefix) == k:
            blocks = {}
            for pt, lab in enumerate(prefix, 1):
                blocks.setdefault(lab, []).append(pt)
            out.append(tuple(tuple(b) for b in sorted(blocks.values())))
            return
        for lab in range(m + 2):
            rec(prefix + [lab], max(m, lab))

    if k == 0:
        return [()]
    rec([0], 0)
    return out


def crosses(blocks):
    pairs = [b for b in blocks if len(b) == 2]
    for (a, b) in pairs:
        for (c, d) in pairs:
            if a < c < b < d:
                return True
    return False


def crosses_any(blocks):
    """Crossing test for arbitrary blocks: a < c < b < d with a,b in one block, c,d in another."""
    for i, x in enumerate(blocks):
        for y in blocks[i + 1:]:
            for a in x:
                for b in x:
                    for c in y:
                        for d in y:
                            if a < c < b < d or c < a < d < b:
                                return True
    return False


def brute_family(name, k):
    """Filter-all oracle over every set partition."""
    allp = rgs_set_partitions(k)
    if name == "SET_PARTITIONS":
        return sorted(allp)
    if name == "P2":
        return sorted(p for p in allp if all(len(b) == 2 for b in p))
    if name == "NC2":
        return sorted(p for p in allp if all(len(b) == 2 for b in p) and not crosses(p))
    if name == "NC21":
        return sorted(p for p in allp if all(len(b) <= 2 for b in p) and not crosses(p))
    if name == "EVENODD_ALL":
        return sorted(p for p in allp if all(len(b) == 2 and (b[0] + b[1]) % 2 == 1 for b in p))
    if name == "EVENODD_NC":
        return sorted(p for p in allp
                      if all(len(b) == 2 and (b[0] + b[1]) % 2 == 1 for b in p) and not crosses(p))
    raise ValueError(name)


def catalan_binomial(m):
    return comb(2 * m, m) // (m + 1)


def motzkin_sum(k):
    return sum(comb(k, 2 * j) * catalan_binomial(j) for j in range(k // 2 + 1))


def bell_triangle(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def join_components(p, q, k):
    """Blocks of p ∨ q by repeated merging of overlapping sets."""
    sets = [set(b) for b in p] + [set(b) for b in q]
    merged = True
    while merged:
        merged = False
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                if sets[i] & sets[j]:
                    sets[i] |= sets.pop(j)
                    merged = True
                    break
            if merged:
                break
    return len(sets)


def dense_tensor(blocks, N, k, ranges=None):
    """T_p as a dict over all N^k index tuples (1-based), by direct definition."""
    out = {}
    for idx in product(range(1, N + 1), repeat=k):
        ok = True
        for bi, b in enumerate(blocks):
            vals = {idx[x - 1] for x in b}
            if len(vals) != 1:
                ok = False
                break
            if ranges is not None and idx[b[0] - 1] not in ranges[bi]:
                ok = False
                break
        if ok:
            out[idx] = 1
    return out


def fraction_rank(rows):
    """Rank by plain Gaussian elimination over Fraction."""
    M = [[Fraction(x) for x in r] for r in rows]
    if not M:
        return 0
    rank = 0
    cols = len(M[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def dense_rows(tensors):
    """Coefficient rows over all N^k coordinates."""
    return [t.to_dense() for t in tensors]


def permutation_power(perm, N, k):
    """Index map of σ^{⊗k} on 0-based flattened coordinates."""
    out = {}
    for idx in product(range(N), repeat=k):
        img = tuple(perm[i] for i in idx)
        a = sum(v * N ** (k - 1 - j) for j, v in enumerate(idx))
        b = sum(v * N ** (k - 1 - j) for j, v in enumerate(img))
        out[a] = b
    return out


def all_permutations(N):
    return list(permutations(range(N)))
