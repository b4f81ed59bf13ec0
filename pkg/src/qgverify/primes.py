import random

# deterministic for n < 3.3e24, far beyond the 31-bit primes used here
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_primes(count: int, seed: int = 0, lo: int = 2 ** 30, hi: int = 2 ** 31) -> list[int]:
    """`count` distinct primes drawn uniformly from (lo, hi), reproducible from `seed`."""
    rng = random.Random(seed)
    found: list[int] = []
    while len(found) < count:
        n = rng.randrange(lo + 1, hi) | 1
        if n < hi and n not in found and is_prime(n):
            found.append(n)
    return found
