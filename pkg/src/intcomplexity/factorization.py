"""Divisor machinery: batched divisor lists, an SPF sieve, deterministic
primality and 128-bit factorization (Pollard rho with Brent cycling).
"""

from __future__ import annotations

import math
from typing import Dict, List

import numpy as np
import gmpy2

MAX_FACTOR_BITS = 127

# Largest n for which the listed Miller-Rabin witness sets are proven complete.
_MR_SETS = [
    (2047, (2,)),
    (1373653, (2, 3)),
    (9080191, (31, 73)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318665857834031151167461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3317044064679887385961981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
]

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67]

# ~N*ln(N) list entries; keep the all-divisors sieve for test-scale N only.
DIVISOR_SIEVE_CAP = 20_000_000


def divisor_sieve(N: int) -> List[List[int]]:
    """D[i] = sorted list of every divisor of i, for i = 1..N (D[0] unused)."""
    if N < 1:
        raise ValueError("N must be positive")
    est_entries = int(N * (math.log(N) + 1)) if N > 1 else 1
    if est_entries > DIVISOR_SIEVE_CAP:
        raise MemoryError(
            f"divisor_sieve(N={N}) needs ~{est_entries} list entries; "
            "use build_spf/divisors_of instead"
        )
    D: List[List[int]] = [[] for _ in range(N + 1)]
    for i in range(1, N + 1):
        for k in range(i, N + 1, i):
            D[k].append(i)
    return D


def build_spf(N: int) -> np.ndarray:
    """Smallest-prime-factor sieve: spf[n] = least prime dividing n (n >= 2)."""
    if N < 2:
        raise ValueError("N must be at least 2")
    spf = np.zeros(N + 1, dtype=np.int64)
    spf[2::2] = 2
    for p in range(3, math.isqrt(N) + 1, 2):
        if spf[p] == 0:
            sl = spf[p * p :: 2 * p]
            sl[sl == 0] = p
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    spf[0] = spf[1] = 1
    return spf


def factorize_with_spf(n: int, spf: np.ndarray) -> Dict[int, int]:
    if not 2 <= n < len(spf):
        raise ValueError(f"{n} outside sieve range")
    out: Dict[int, int] = {}
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out[p] = e
    return dict(sorted(out.items()))


def divisors_of(n: int, spf: np.ndarray) -> List[int]:
    """Sorted divisors of n, generated from the SPF factorization."""
    return divisors_from_factors(factorize_with_spf(n, spf))


def divisors_from_factors(fm: Dict[int, int]) -> List[int]:
    divs = [1]
    for p, e in fm.items():
        pk = 1
        grown = list(divs)
        for _ in range(e):
            pk *= p
            grown.extend(d * pk for d in divs)
        divs = grown
    return sorted(divs)


def is_prime(n: int) -> bool:
    """Deterministic primality for n < 2**127.

    Uses Miller-Rabin witness sets proven complete up to ~3.3e24; above that,
    strong BPSW plus fixed extra bases (deterministic, no known failures).
    """
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n.bit_length() > MAX_FACTOR_BITS:
        raise ValueError("is_prime supports n < 2**127")
    z = gmpy2.mpz(n)
    for bound, bases in _MR_SETS:
        if n < bound:
            return all(gmpy2.is_strong_prp(z, a) for a in bases)
    if not gmpy2.is_strong_bpsw_prp(z):
        return False
    return all(gmpy2.is_strong_prp(z, a) for a in (3, 5, 7, 11, 13))


def _rho_brent(n: gmpy2.mpz, c: int) -> int:
    """Brent-cycle Pollard rho on x^2 + c; returns a nontrivial factor or 0."""
    y, r, q = gmpy2.mpz(2), 1, gmpy2.mpz(1)
    g, ys, x = gmpy2.mpz(1), y, y
    m = 128
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gmpy2.gcd(q, n)
            k += m
        r <<= 1
    if g == n:
        g = gmpy2.mpz(1)
        while g == 1:
            ys = (ys * ys + c) % n
            g = gmpy2.gcd(abs(x - ys), n)
    return 0 if g == n else int(g)


def factorize(n: int) -> Dict[int, int]:
    """Complete prime factorization of n (2 <= n < 2**127), deterministic."""
    n = int(n)
    if n < 2:
        raise ValueError("n must be at least 2")
    if n.bit_length() > MAX_FACTOR_BITS:
        raise ValueError("factorize supports n < 2**127")
    out: Dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        # perfect powers collapse fast (frequent for power-collapse workloads)
        handled = False
        for k in (2, 3, 5, 7, 11, 13):
            root, exact = gmpy2.iroot(gmpy2.mpz(m), k)
            if exact and root > 1:
                stack.extend([int(root)] * k)
                handled = True
                break
        if handled:
            continue
        z = gmpy2.mpz(m)
        f = 0
        c = 1
        while not f:
            f = _rho_brent(z, c)
            c += 1  # deterministic retry sequence on cycle failure
        stack.append(f)
        stack.append(m // f)
    return dict(sorted(out.items()))
