"""Numeric constants and bound functions shared by every engine.

The three quantities that matter everywhere:

* ``lower_bound(n)``  -- ceil(3*log3(n)), the unconditional lower bound.
* ``upper_bound(n)``  -- floor(alpha*log3(n)) with alpha = 4.125 by default.
* ``addendum_limit(n)`` -- cap on the smaller part of any useful additive
  split, max(ceil(n**ell), 16) with ell = alpha/3 - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import gmpy2

INFINITY = 255  # sentinel for "unknown / not representable" complexity values
VALUE_CEILING = 254  # largest representable finite complexity value

# Smallest addendum cap is asymptotic; this floor absorbs small-n slack.
ADDENDUM_FLOOR = 16

LOG3 = math.log(3.0)


@dataclass(frozen=True)
class Limits:
    """Bound constants. ``ell`` and ``t`` always derive from the live alpha."""

    alpha: float = 4.125
    alpha0_override: Optional[float] = None

    def __post_init__(self):
        a = self.effective_alpha
        if not 3.0 < a <= 4.755:
            raise ValueError(f"alpha must lie in (3, 4.755], got {a}")
        if not 0.0 < self.ell < 0.5:
            raise ValueError(
                f"ell = alpha/3 - 1 must lie in (0, 0.5); alpha {a} gives {self.ell}"
            )

    @property
    def effective_alpha(self) -> float:
        return self.alpha0_override if self.alpha0_override is not None else self.alpha

    @property
    def ell(self) -> float:
        return self.effective_alpha / 3.0 - 1.0

    @property
    def t(self) -> float:
        return 1.0 / (2.0 - self.ell)


DEFAULT_LIMITS = Limits()


def log3(n) -> float:
    return math.log(n) / LOG3


def lower_bound(n) -> int:
    """ceil(3*log3(n)) via exact integer comparison of 3**k against n**3."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 0
    n = int(n)
    k = max(0, math.floor(3.0 * log3(n)) - 1)
    cube = n * n * n
    p = 3**k
    while p < cube:
        p *= 3
        k += 1
    return k


def upper_bound(n, limits: Limits = DEFAULT_LIMITS) -> int:
    """floor(alpha*log3(n)), rounded up one ulp first so the floor never
    undershoots the real bound."""
    if n < 2:
        raise ValueError("upper_bound is only stated for n > 1")
    x = limits.effective_alpha * log3(int(n))
    return math.floor(math.nextafter(x, math.inf))


def addendum_limit(n, limits: Limits = DEFAULT_LIMITS) -> int:
    """Cap on the smaller addendum of an optimal split: max(ceil(n**ell), 16)."""
    if n < 1:
        raise ValueError("n must be positive")
    return max(ADDENDUM_FLOOR, ipow_ceil(int(n), limits.ell))


def ipow_ceil(n: int, expo: float) -> int:
    """ceil(n**expo) for expo in (0, 1).

    Exact when expo is a small rational (the default ell = 3/8 is); otherwise
    a one-ulp-up guarded float so boundary cases never round down.
    """
    if n <= 1:
        return n
    from fractions import Fraction

    frac = Fraction(expo).limit_denominator(64)
    if float(frac) == expo and frac.denominator <= 64:
        root, exact = gmpy2.iroot(gmpy2.mpz(n) ** frac.numerator, frac.denominator)
        return int(root) if exact else int(root) + 1
    return math.ceil(math.nextafter(float(n) ** expo, math.inf))


def lb_thresholds(k_max: int):
    """bnd[k] = largest integer x with lower_bound(x) <= k, i.e. x**3 <= 3**k.

    Exact (gmpy2 integer roots). Used to vectorize lower_bound checks and to
    turn complexity budgets back into index caps.
    """
    out = []
    p = gmpy2.mpz(1)
    for _k in range(k_max + 1):
        root, _ = gmpy2.iroot(p, 3)
        out.append(int(root))
        p *= 3
    return out


def ub_thresholds(k_max: int, limits: Limits = DEFAULT_LIMITS):
    """bnd[k] = smallest integer n >= 2 with upper_bound(n) >= k.

    Exact for the default alpha = 4.125 = 33/8 (integer comparison
    3**(8k) <= n**33); falls back to guarded floats otherwise.
    """
    a = limits.effective_alpha
    out = [2] * (k_max + 1)
    if a == 4.125:
        for k in range(1, k_max + 1):
            root, exact = gmpy2.iroot(gmpy2.mpz(3) ** (8 * k), 33)
            n = int(root) if exact else int(root) + 1
            out[k] = max(2, n)
    else:
        for k in range(1, k_max + 1):
            out[k] = max(2, math.ceil(3.0 ** (k / a) - 1e-9))
    return out
