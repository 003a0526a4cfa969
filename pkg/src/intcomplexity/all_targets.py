"""All-targets engine: f(1..N) by divide-and-conquer online (min,+)-convolution
with multiplication updates applied at the leaves.

func(l, r) recursion: finish the left half, push its additive contributions
into the right half with one truncated (min,+)-convolution against the f(1..B)
prefix, then finish the right half.  Engine choice only changes how the merge
convolution runs:

* ``brute``  -- full prefix, quadratic loop.
* ``capped`` -- prefix truncated to addendum_limit(r); fastest, equal output.
* ``packed`` -- full prefix through the packed transform.

Below ``block_size`` the subtree is collapsed into one in-order scan that
applies exactly the same update set (pass block_size=1 to see the recursion
in its pure shape).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import convolution
from .bounds import (DEFAULT_LIMITS, INFINITY, VALUE_CEILING, Limits,
                     addendum_limit, lb_thresholds, lower_bound, upper_bound)
from .factorization import build_spf

ENGINES = ("brute", "capped", "packed")
DEFAULT_BLOCK = 4096
ORACLE_CAP = 100_000

try:
    from ._kernels import block_additive_scan as _nb_block_scan
except Exception:  # pragma: no cover - numba missing or compile failure
    _nb_block_scan = None


@dataclass
class ComplexityTable:
    """Dense f-values for 1..N. values[0] is unused and stays at 255."""

    N: int
    values: np.ndarray
    engine_tag: str
    record_choices: bool = False
    limits: Limits = field(default=DEFAULT_LIMITS)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise IndexError(f"n={n} outside 1..{self.N}")
        return int(self.values[n])


def _lb_bound_array(N: int) -> np.ndarray:
    cap = 1 << 62  # queries stay below this; larger thresholds clamp
    ks = [min(x, cap) for x in lb_thresholds(upper_bound(max(N, 2)) + 4)]
    return np.array(ks, dtype=np.int64)


def _small_lb_table(limit: int) -> np.ndarray:
    bnd = lb_thresholds(int(3.1 * math.log(max(limit, 2)) / math.log(3)) + 4)
    out = np.zeros(limit + 1, dtype=np.uint8)
    k = 0
    for x in range(2, limit + 1):
        while bnd[k] < x:
            k += 1
        out[x] = k
    return out


def _additive_scan_numpy(f: np.ndarray, l: int, r: int, cap: int) -> None:
    for n in range(max(l, 2), r + 1):
        ycap = min(n - l, cap, n - 1)
        if ycap < 1:
            continue
        cand = f[1 : ycap + 1].astype(np.int32) + f[n - 1 : n - ycap - 1 : -1]
        m = int(cand.min())
        if m < f[n]:
            f[n] = m


def _block_pass(f, l, r, cap, lb_small, lb_bnd, use_numba):
    """Multiplication then additive updates for the collapsed block [l, r]."""
    sq = math.isqrt(r)
    fw = f  # uint8 view; sums stay below 255+255 via int promotion per slice
    for a in range(2, sq + 1):
        j_lo = max(a, -(-l // a))
        j_hi = r // a
        if j_lo > j_hi:
            continue
        sl = fw[a * j_lo : a * j_hi + 1 : a]
        cand = fw[j_lo : j_hi + 1].astype(np.int16) + int(fw[a])
        np.minimum(sl, np.minimum(cand, INFINITY).astype(np.uint8), out=sl)
    if use_numba and _nb_block_scan is not None:
        _nb_block_scan(f, l, r, cap, lb_small, lb_bnd, l)
    else:
        _additive_scan_numpy(f, l, r, cap)


def _first_block(f, r, cap, spf_divpairs):
    """Elements 1..r interleave mult and additive updates (divisors may sit
    inside the block, so nothing can be batched ahead of time)."""
    f[1] = 1
    for n in range(2, r + 1):
        best = int(f[n])
        for a in spf_divpairs[n]:
            c = int(f[a]) + int(f[n // a])
            if c < best:
                best = c
        ycap = min(n - 1, cap)
        for y in range(1, ycap + 1):
            c = int(f[y]) + int(f[n - y])
            if c < best:
                best = c
        f[n] = best


def _merge(f, l, m, r, B, engine, merge_hook):
    """Update f(m+1..r) from pairs (x in [l,m]) + (y in [1,B])."""
    if B < 1:
        return
    if merge_hook is not None:
        merge_hook(l, m, r, B)
    if engine == "packed" and min(m - l + 1, B) >= convolution.PACKED_CUTOFF:
        c = convolution.minplus_packed(f[l : m + 1], f[1 : B + 1])
        # c[k] covers target n = l + 1 + k; keep n in [m+1, r]
        lo, hi = m + 1, r
        seg = c[lo - l - 1 : hi - l]
        tgt = f[lo : hi + 1]
        np.minimum(tgt, seg[: tgt.size], out=tgt)
        return
    for y in range(1, B + 1):
        fy = int(f[y])
        x_lo = max(l, m + 1 - y)
        x_hi = min(m, r - y)
        if x_lo > x_hi:
            continue
        tgt = f[x_lo + y : x_hi + y + 1]
        cand = f[x_lo : x_hi + 1].astype(np.int16) + fy
        np.minimum(tgt, np.minimum(cand, INFINITY).astype(np.uint8), out=tgt)


def compute_table(
    N: int,
    limits: Limits = DEFAULT_LIMITS,
    engine: str = "capped",
    block_size: int = DEFAULT_BLOCK,
    record_choices: bool = False,
    merge_hook: Optional[Callable] = None,
    use_numba: bool = True,
) -> ComplexityTable:
    """Compute f(1..N). All engines produce the identical table."""
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    if N < 1:
        raise ValueError("N must be positive")
    if N > 1 and upper_bound(N, limits) > VALUE_CEILING:
        raise OverflowError("complexity values would exceed the 254 ceiling")

    f = np.full(N + 1, INFINITY, dtype=np.uint8)
    f[1] = 1
    if N == 1:
        return ComplexityTable(N, f, engine, record_choices, limits)

    block_size = max(1, block_size)
    lb_small = _small_lb_table(min(N, max(2, addendum_limit(N, limits), block_size)))
    lb_bnd = _lb_bound_array(N)

    first_w = min(N, block_size) if block_size > 1 else 0
    divpairs = None
    if first_w >= 2:
        spf = build_spf(first_w)
        divpairs = [[] for _ in range(first_w + 1)]
        for n in range(4, first_w + 1):
            for a in range(2, math.isqrt(n) + 1):
                if n % a == 0:
                    divpairs[n].append(a)
        del spf

    def cap_for(r: int) -> int:
        if engine == "capped":
            return addendum_limit(r, limits)
        return r  # effectively uncapped

    def func(l: int, r: int):
        if r - l + 1 <= block_size and merge_hook is None:
            if l == 1:
                _first_block(f, r, cap_for(r), divpairs)
            else:
                _block_pass(f, l, r, min(cap_for(r), r - l), lb_small, lb_bnd, use_numba)
            return
        if l == r:
            _leaf_mult(f, l)
            return
        m = (l + r) // 2
        func(l, m)
        B = min(r - l, m, cap_for(r))
        _merge(f, l, m, r, B, engine, merge_hook)
        func(m + 1, r)

    func(1, N)
    return ComplexityTable(N, f, engine, record_choices, limits)


def _leaf_mult(f, n):
    if n < 4:
        return
    best = int(f[n])
    for a in range(2, math.isqrt(n) + 1):
        if n % a == 0:
            c = int(f[a]) + int(f[n // a])
            if c < best:
                best = c
    f[n] = best


def naive_oracle(N: int, limits: Limits = DEFAULT_LIMITS) -> ComplexityTable:
    """Direct quadratic evaluation of the recurrence; ground truth for tests."""
    if N < 1:
        raise ValueError("N must be positive")
    if N > ORACLE_CAP:
        raise ValueError(f"naive_oracle is quadratic; capped at {ORACLE_CAP}")
    f = np.full(N + 1, 10**6, dtype=np.int32)
    f[1] = 1
    spf = build_spf(max(N, 2)) if N >= 2 else None
    for n in range(2, N + 1):
        best = 10**6
        m = n
        while m > 1:  # divisor pairs straight off the SPF factorization
            p = int(spf[m])
            if n // p >= p or True:
                pass
            m //= p
            while m % p == 0:
                m //= p
        for a in _divpairs(n, spf):
            c = int(f[a]) + int(f[n // a])
            if c < best:
                best = c
        half = n // 2
        cand = f[1 : half + 1] + f[n - 1 : n - half - 1 : -1]
        if half >= 1:
            best = min(best, int(cand.min()))
        f[n] = best
    vals = f.astype(np.uint8)
    vals[0] = INFINITY
    return ComplexityTable(N, vals, "oracle", False, limits)


def _divpairs(n, spf):
    out = []
    m = n
    fm = {}
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        fm[p] = e
    divs = [1]
    for p, e in fm.items():
        pk = 1
        grown = list(divs)
        for _ in range(e):
            pk *= p
            grown.extend(d * pk for d in divs)
        divs = grown
    for d in divs:
        if d >= 2 and d * d <= n:
            out.append(d)
    return out


def check_bounds(table: ComplexityTable) -> bool:
    """lower_bound(n) <= f(n) <= upper_bound(n) for all 2 <= n <= N, exactly."""
    N = table.N
    if N < 2:
        return True
    v = table.values[2 : N + 1].astype(np.int64)
    n = np.arange(2, N + 1, dtype=np.int64)
    lb_bnd = _lb_bound_array(N)
    lbs = np.searchsorted(lb_bnd, n, side="left")
    from .bounds import ub_thresholds

    ub_bnd = np.array(ub_thresholds(int(v.max()) + 2, table.limits), dtype=np.int64)
    ubs = np.searchsorted(ub_bnd, n, side="right") - 1
    return bool(np.all(lbs <= v) and np.all(v <= ubs))


MAGIC = b"ICT1"
FORMAT_VERSION = 1


def write_table(table: ComplexityTable, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<B", FORMAT_VERSION))
        fh.write(struct.pack("<Q", table.N))
        fh.write(table.values[1 : table.N + 1].tobytes())


def read_table(path: str, limits: Limits = DEFAULT_LIMITS) -> ComplexityTable:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError("not a complexity table file")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported version {version}")
        (N,) = struct.unpack("<Q", fh.read(8))
        body = fh.read(N)
        if len(body) != N:
            raise ValueError("truncated table file")
    values = np.empty(N + 1, dtype=np.uint8)
    values[0] = INFINITY
    values[1:] = np.frombuffer(body, dtype=np.uint8)
    return ComplexityTable(int(N), values, "file", False, limits)
