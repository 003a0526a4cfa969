"""Classical polynomial convolution and bounded-entry (min,+)-convolution.

The packed (min,+) route encodes each sequence as an indicator polynomial
(one term at exponent B*i + a[i], base B = 2u+1 so sums never bleed across
buckets), multiplies exactly over the integers, and reads each output off the
lowest surviving exponent in its bucket.  Exactness comes from doing the
product on big integers (GMP), so a coefficient is zero iff no pair lands on
that exponent; no modulus is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import gmpy2

from .bounds import INFINITY, VALUE_CEILING

# Below this length the quadratic loop beats the packing overhead.
PACKED_CUTOFF = 256

_INF_WIDE = 1 << 20


class ConvolutionOverflow(Exception):
    """A finite result exceeded the representable complexity ceiling."""


@dataclass(frozen=True)
class BoundedSeq:
    """Sequence of complexity values (255 = infinity), finite entries <= u."""

    entries: np.ndarray
    u: int

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.uint8)
        object.__setattr__(self, "entries", ent)
        if not 0 <= self.u <= VALUE_CEILING:
            raise ValueError(f"bound u={self.u} outside 0..{VALUE_CEILING}")
        finite = ent[ent != INFINITY]
        if finite.size and int(finite.max()) > self.u:
            raise ValueError("finite entry exceeds declared bound")


def _as_entries(x) -> np.ndarray:
    if isinstance(x, BoundedSeq):
        return x.entries
    return np.asarray(x, dtype=np.uint8)


def _shared_bound(a, b, ea: np.ndarray, eb: np.ndarray) -> int:
    if isinstance(a, BoundedSeq) or isinstance(b, BoundedSeq):
        ua = a.u if isinstance(a, BoundedSeq) else _max_finite(ea)
        ub = b.u if isinstance(b, BoundedSeq) else _max_finite(eb)
        return max(ua, ub)
    return max(_max_finite(ea), _max_finite(eb))


def _max_finite(e: np.ndarray) -> int:
    finite = e[e != INFINITY]
    return int(finite.max()) if finite.size else 0


def poly_multiply(a, b):
    """Exact integer convolution of two nonnegative coefficient arrays.

    Kronecker substitution: pack coefficients into fixed-width slots of one
    big integer and let GMP do the (FFT-backed) product.  Slot width is sized
    from the worst-case output coefficient, so the result is always exact.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("poly_multiply needs nonempty arrays")
    if (a < 0).any() or (b < 0).any():
        raise ValueError("coefficients must be nonnegative")
    max_coef = int(min(a.size, b.size)) * max(int(a.max()), 1) * max(int(b.max()), 1)
    slot_bits = max(8, (max_coef.bit_length() + 7) // 8 * 8)
    if slot_bits > 64:
        raise ConvolutionOverflow(
            f"output coefficients up to {max_coef} exceed the packing width"
        )
    out_len = a.size + b.size - 1
    dtype = {8: np.uint8, 16: np.uint16, 24: np.uint32, 32: np.uint32,
             40: np.uint64, 48: np.uint64, 56: np.uint64, 64: np.uint64}[slot_bits]
    # widths 24/40/48/56 round up to the next numpy dtype
    slot_bits = {8: 8, 16: 16, 24: 32, 32: 32, 40: 64, 48: 64, 56: 64, 64: 64}[slot_bits]
    za = _pack(a.astype(dtype), slot_bits)
    zb = _pack(b.astype(dtype), slot_bits)
    return _unpack(za * zb, slot_bits, out_len, dtype).astype(np.int64)


def _pack(arr: np.ndarray, slot_bits: int) -> gmpy2.mpz:
    return gmpy2.mpz(int.from_bytes(arr.tobytes(), "little"))


def _unpack(z: gmpy2.mpz, slot_bits: int, n_slots: int, dtype) -> np.ndarray:
    nbytes = n_slots * (slot_bits // 8)
    buf = int(z).to_bytes(nbytes, "little")
    return np.frombuffer(buf, dtype=dtype, count=n_slots).copy()


def minplus_brute(a, b):
    """Exact (min,+)-convolution; 255 entries are absorbing infinities."""
    ea, eb = _as_entries(a), _as_entries(b)
    if ea.size == 0 or eb.size == 0:
        raise ValueError("empty input")
    wa = ea.astype(np.int64)
    wb = eb.astype(np.int64)
    wa[wa == INFINITY] = _INF_WIDE
    wb[wb == INFINITY] = _INF_WIDE
    if wa.size > wb.size:
        wa, wb = wb, wa
    out = np.full(wa.size + wb.size - 1, 2 * _INF_WIDE, dtype=np.int64)
    for j in range(wa.size):
        fj = wa[j]
        if fj >= _INF_WIDE:
            continue
        seg = out[j : j + wb.size]
        np.minimum(seg, wb + fj, out=seg)
    return _finish(out)


def _finish(wide: np.ndarray) -> np.ndarray:
    finite = wide < _INF_WIDE
    if finite.any() and int(wide[finite].max()) > VALUE_CEILING:
        raise ConvolutionOverflow(
            f"finite (min,+) result {int(wide[finite].max())} exceeds {VALUE_CEILING}"
        )
    return np.where(finite, wide, INFINITY).astype(np.uint8)


def minplus_packed(a, b, check_buckets: bool = False):
    """(min,+)-convolution via the packed indicator-polynomial encoding.

    Output contract is identical to minplus_brute.
    """
    ea, eb = _as_entries(a), _as_entries(b)
    if ea.size == 0 or eb.size == 0:
        raise ValueError("empty input")
    u = _shared_bound(a, b, ea, eb)
    if u > VALUE_CEILING:
        raise ValueError("bound exceeds representable ceiling")
    B = 2 * u + 1
    n_out = ea.size + eb.size - 1
    max_count = min(ea.size, eb.size)
    dtype = np.uint16 if max_count < (1 << 16) else np.uint32
    slot_bits = 16 if dtype is np.uint16 else 32

    za = _pack(_indicator(ea, B, dtype), slot_bits)
    zb = _pack(_indicator(eb, B, dtype), slot_bits)
    if za == 0 or zb == 0:  # an all-infinity side
        return np.full(n_out, INFINITY, dtype=np.uint8)
    prod = za * zb

    n_slots = n_out * B
    counts = _unpack(prod, slot_bits, n_slots, dtype).reshape(n_out, B)
    mask = counts != 0
    hit = mask.any(axis=1)
    offs = mask.argmax(axis=1)
    if check_buckets:
        # bucket separation: every surviving exponent must sit below B
        assert int(offs[hit].max(initial=0)) <= 2 * u
    wide = np.where(hit, offs, _INF_WIDE).astype(np.int64)
    return _finish(wide)


def _indicator(e: np.ndarray, B: int, dtype) -> np.ndarray:
    idx = np.nonzero(e != INFINITY)[0]
    slots = np.zeros(e.size * B, dtype=dtype)
    slots[idx * B + e[idx].astype(np.int64)] = 1
    return slots


def minplus(a, b):
    """Dispatch: quadratic loop below PACKED_CUTOFF, packed transform above."""
    ea, eb = _as_entries(a), _as_entries(b)
    if min(ea.size, eb.size) < PACKED_CUTOFF:
        return minplus_brute(ea, eb)
    return minplus_packed(a, b)
