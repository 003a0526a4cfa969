import math

import numpy as np
import pytest

from intcomplexity import factorization as fz


def test_divisor_sieve_examples():
    D = fz.divisor_sieve(12)
    assert D[1] == [1]
    assert D[12] == [1, 2, 3, 4, 6, 12]


def test_divisor_sieve_sum_identity():
    N = 10_000
    D = fz.divisor_sieve(N)
    total = sum(len(D[i]) for i in range(1, N + 1))
    assert total == sum(N // i for i in range(1, N + 1))


def test_divisor_sieve_memory_guard():
    with pytest.raises(MemoryError):
        fz.divisor_sieve(10**9)


def test_spf_divisors_match_sieve():
    N = 10_000
    D = fz.divisor_sieve(N)
    spf = fz.build_spf(N)
    for n in range(2, N + 1):
        assert fz.divisors_of(n, spf) == D[n]


def test_divisors_of_examples():
    spf = fz.build_spf(100)
    assert fz.divisors_of(97, spf) == [1, 97]
    assert fz.divisors_of(36, spf) == [1, 2, 3, 4, 6, 9, 12, 18, 36]


def test_is_prime_small_agreement():
    limit = 200_000
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    for n in range(1, limit + 1):
        assert fz.is_prime(n) == bool(sieve[n]), n


def test_is_prime_examples():
    assert not fz.is_prime(1)
    assert fz.is_prime(97)
    assert not fz.is_prime(733**6)
    assert fz.is_prime(2**89 - 1)  # Mersenne prime, exercises the BPSW tier


def test_factorize_examples():
    assert fz.factorize(91) == {7: 1, 13: 1}
    assert fz.factorize(2**64) == {2: 64}
    assert fz.factorize(733**6) == {733: 6}


def test_factorize_rebuilds_value():
    spf = fz.build_spf(100_000)
    for n in range(2, 100_001, 37):
        fm = fz.factorize(n)
        v = 1
        for p, e in fm.items():
            v *= p**e
            assert fz.is_prime(p)
        assert v == n
        assert fz.divisors_from_factors(fm) == fz.divisors_of(n, spf)


def test_factorize_two_random_40bit_primes():
    rng = np.random.default_rng(11)
    primes = []
    while len(primes) < 2:
        c = int(rng.integers(1 << 39, 1 << 40)) | 1
        if fz.is_prime(c):
            primes.append(c)
    p, q = primes
    assert fz.factorize(p * q) == ({p: 2} if p == q else {min(p, q): 1, max(p, q): 1})


def test_factorize_wide_input():
    p = 2**61 - 1  # Mersenne prime
    q = 2**31 - 1
    assert fz.factorize(p * q) == {q: 1, p: 1}  # 92-bit product
    assert fz.factorize(3 * p * p) == {3: 1, p: 2}  # 124-bit
    with pytest.raises(ValueError):
        fz.factorize(p * p * q)  # 153 bits: beyond the supported width


def test_kernel_primality_and_rho_agree_with_reference():
    kernels = pytest.importorskip("intcomplexity._kernels")
    rng = np.random.default_rng(5)
    for n in rng.integers(2, 1 << 60, 4000):
        n = int(n)
        assert kernels.is_prime_u64(n) == fz.is_prime(n), n
    pbuf = np.zeros(16, dtype=np.int64)
    ebuf = np.zeros(16, dtype=np.int64)
    for n in rng.integers(2, 1 << 58, 600):
        n = int(n)
        cnt = kernels.factorize_u64(n, pbuf, ebuf)
        assert cnt > 0
        got = {int(pbuf[i]): int(ebuf[i]) for i in range(cnt)}
        assert got == fz.factorize(n), n
