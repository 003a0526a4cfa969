"""Numba kernels for the hot paths: flat prefix DP, per-block additive scans,
64-bit deterministic primality / Pollard rho (Montgomery arithmetic over an
llvmlite 128-bit multiply intrinsic), and the single-target window engine.

Everything here is an implementation detail; the public modules expose the
behaviour and the test suite pins kernel outputs to the pure-Python and numpy
reference paths.
"""

from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.extending import intrinsic

# error codes shared with single_target
ERR_GUARD = 1        # lookup fell below a window's guaranteed range
ERR_CEILING = 2      # finite value exceeded 254
ERR_DIVBUF = 3       # divisor buffer overflow
ERR_FACBUF = 4       # factor slot overflow
ERR_RHO = 5          # factorization failed to converge

DIV_BUF_LEN = 1 << 17
MAX_DISTINCT = 16

_U0 = np.uint64(0)
_U1 = np.uint64(1)


@intrinsic
def _umul128(typingctx, a, b):
    """(hi, lo) of the full 128-bit product of two uint64."""
    sig = types.UniTuple(types.uint64, 2)(types.uint64, types.uint64)

    def codegen(context, builder, signature, args):
        i128 = ir.IntType(128)
        i64 = ir.IntType(64)
        x = builder.zext(args[0], i128)
        y = builder.zext(args[1], i128)
        p = builder.mul(x, y)
        hi = builder.trunc(builder.lshr(p, ir.Constant(i128, 64)), i64)
        lo = builder.trunc(p, i64)
        return context.make_tuple(builder, signature.return_type, [hi, lo])

    return sig, codegen


@njit(cache=True, inline="always")
def _addmod(a, b, m):
    # m < 2**62 so the sum cannot wrap
    s = a + b
    if s >= m:
        s = s - m
    return s


@njit(cache=True)
def _mont_ninv_neg(m):
    """-m**-1 mod 2**64 for odd m (Newton iteration, wraparound arith)."""
    inv = m
    for _ in range(6):
        inv = inv * (np.uint64(2) - m * inv)
    return _U0 - inv


@njit(cache=True, inline="always")
def _mont_mul(a, b, m, ninv_neg):
    """REDC(a*b): returns a*b*2**-64 mod m; inputs in Montgomery form."""
    hi, lo = _umul128(a, b)
    q = lo * ninv_neg
    hi2, lo2 = _umul128(q, m)
    r = hi + hi2
    if lo != _U0:
        r = r + _U1  # lo + lo2 == 2**64 exactly
    if r >= m:
        r = r - m
    return r


@njit(cache=True)
def _mont_r2(m):
    """2**128 mod m: start from 2**64 mod m and double 64 times."""
    r = (_U0 - m) % m
    for _ in range(64):
        r = _addmod(r, r, m)
    return r


@njit(cache=True)
def _mont_pow(a_mont, e, m, ninv_neg, one_mont):
    result = one_mont
    base = a_mont
    while e > _U0:
        if e & _U1:
            result = _mont_mul(result, base, m, ninv_neg)
        base = _mont_mul(base, base, m, ninv_neg)
        e = e >> _U1
    return result


_MR_BASES = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37], dtype=np.uint64)


@njit(cache=True)
def is_prime_u64(n):
    """Deterministic Miller-Rabin with magnitude-tiered witness sets; the
    12-prime set is proven complete past 2**62."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 3215031751:
        nbases = 4
    elif n < 3474749660383:
        nbases = 6
    elif n < 341550071728321:
        nbases = 7
    elif n < 3825123056546413051:
        nbases = 9
    else:
        nbases = 12
    m = np.uint64(n)
    ninv = _mont_ninv_neg(m)
    r2 = _mont_r2(m)
    one = _mont_mul(_U1, r2, m, ninv)
    neg_one = m - one
    d = m - _U1
    s = 0
    while d & _U1 == _U0:
        d = d >> _U1
        s += 1
    for bi in range(nbases):
        am = _mont_mul(_MR_BASES[bi], r2, m, ninv)
        x = _mont_pow(am, d, m, ninv, one)
        if x == one or x == neg_one:
            continue
        composite = True
        for _ in range(s - 1):
            x = _mont_mul(x, x, m, ninv)
            if x == neg_one:
                composite = False
                break
        if composite:
            return False
    return True


@njit(cache=True, inline="always")
def _gcd_u64(a, b):
    while b != _U0:
        a, b = b, a % b
    return a


@njit(cache=True)
def _rho_u64(n):
    """Brent-cycle rho on x -> x*x*R^-1 + c with deterministic c escalation.
    n must be an odd composite; returns a nontrivial factor or 0.

    An exact anchor collision (x == y mod n) means the walk closed its global
    cycle without separating a factor; the attempt aborts and c escalates.
    """
    m = np.uint64(n)
    ninv = _mont_ninv_neg(m)
    r2 = _mont_r2(m)
    one = _mont_mul(_U1, r2, m, ninv)
    for c in range(1, 2000):
        cm = _mont_mul(np.uint64(c), r2, m, ninv)
        y = _mont_mul(np.uint64(2), r2, m, ninv)
        g = _U1
        q = one
        x = y
        ys = y
        r = 1
        dead = False
        while g == _U1 and not dead:
            x = y
            for _ in range(r):
                y = _addmod(_mont_mul(y, y, m, ninv), cm, m)
            k = 0
            while k < r and g == _U1 and not dead:
                ys = y
                lim = min(128, r - k)
                for _ in range(lim):
                    y = _addmod(_mont_mul(y, y, m, ninv), cm, m)
                    diff = x - y if x > y else y - x
                    if diff == _U0:
                        dead = True
                        break
                    q = _mont_mul(q, diff, m, ninv)
                g = _gcd_u64(q, m)
                k += 128
            r <<= 1
            if r > (1 << 26):
                dead = True
        if g == m:
            g = _U1
            while g == _U1:
                ys = _addmod(_mont_mul(ys, ys, m, ninv), cm, m)
                diff = x - ys if x > ys else ys - x
                if diff == _U0:
                    g = m
                    break
                g = _gcd_u64(diff, m)
        if _U1 < g < m:
            return np.int64(g)
    return np.int64(0)


@njit(cache=True)
def factorize_u64(n, pbuf, ebuf):
    """Factor n (< 2**62) into pbuf/ebuf; returns distinct-prime count, -1 on
    failure. Deterministic."""
    cnt = 0
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pbuf[cnt] = p
            ebuf[cnt] = e
            cnt += 1
    stack = np.empty(64, dtype=np.int64)
    top = 0
    if n > 1:
        stack[top] = n
        top += 1
    while top > 0:
        top -= 1
        mval = stack[top]
        if is_prime_u64(mval):
            placed = False
            for i in range(cnt):
                if pbuf[i] == mval:
                    ebuf[i] += 1
                    placed = True
                    break
            if not placed:
                if cnt >= MAX_DISTINCT:
                    return -1
                pbuf[cnt] = mval
                ebuf[cnt] = 1
                cnt += 1
            continue
        g = _rho_u64(mval)
        if g <= 1 or g >= mval:
            return -1
        if top + 2 > stack.shape[0]:
            return -1
        stack[top] = g
        top += 1
        stack[top] = mval // g
        top += 1
    for i in range(1, cnt):
        pi = pbuf[i]
        ei = ebuf[i]
        j = i - 1
        while j >= 0 and pbuf[j] > pi:
            pbuf[j + 1] = pbuf[j]
            ebuf[j + 1] = ebuf[j]
            j -= 1
        pbuf[j + 1] = pi
        ebuf[j + 1] = ei
    return cnt


@njit(cache=True, inline="always")
def _lb_of(x, lb_bnd):
    """lower_bound(x) by binary search over the exact 3**k thresholds."""
    lo = 0
    hi = lb_bnd.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if lb_bnd[mid] >= x:
            hi = mid
        else:
            lo = mid + 1
    return np.int64(lo)


@njit(cache=True, inline="always")
def _isqrt64(v):
    s = np.int64(np.sqrt(np.float64(v)))
    while (s + 1) * (s + 1) <= v:
        s += 1
    while s * s > v:
        s -= 1
    return s


@njit(cache=True)
def block_additive_scan(f, l, r, cap, lb_small, lb_bnd, scan_from):
    """In-order additive DP over [l, r]: f[n] <- min(f[n], f[y] + f[n-y]) for
    1 <= y <= min(cap, n - scan_from), with sound lower-bound early stopping.

    scan_from = l inside the divide-and-conquer (ancestor merges own the
    pairs whose large part sits left of the block); scan_from = 1 for the
    flat prefix DP, which has no merges above it.
    """
    lmax = lb_small.shape[0] - 1
    for n in range(max(l, 2), r + 1):
        ycap = n - scan_from
        if ycap > cap:
            ycap = cap
        if ycap > n - 1:
            ycap = n - 1
        if ycap < 1:
            continue
        best = np.int64(f[n])
        base = _lb_of(n - ycap, lb_bnd)
        for y in range(1, ycap + 1):
            if y <= lmax and np.int64(lb_small[y]) + base >= best:
                break
            c = np.int64(f[y]) + np.int64(f[n - y])
            if c < best:
                best = c
        if best < np.int64(f[n]):
            f[n] = np.uint8(best)


@njit(cache=True)
def prefix_scan(f, N, ell, lb_small, lb_bnd):
    """Flat capped DP filling f[1..N]; equals the divide-and-conquer table."""
    f[1] = 1
    boot = min(N, 1 << 13)
    lmax = lb_small.shape[0] - 1
    for n in range(2, boot + 1):
        best = np.int64(300)
        a = 2
        while a * a <= n:
            if n % a == 0:
                c = np.int64(f[a]) + np.int64(f[n // a])
                if c < best:
                    best = c
            a += 1
        capn = np.int64(max(16.0, np.float64(n) ** ell)) + 2
        ycap = min(n - 1, capn)
        base = _lb_of(n - ycap, lb_bnd)
        for y in range(1, ycap + 1):
            if y <= lmax and np.int64(lb_small[y]) + base >= best:
                break
            c = np.int64(f[y]) + np.int64(f[n - y])
            if c < best:
                best = c
        f[n] = np.uint8(best)
    if N <= boot:
        return
    sq = _isqrt64(np.int64(N))
    nxt = np.empty(sq + 1, dtype=np.int64)
    for a in range(2, sq + 1):
        start = (boot + a) // a  # first multiple beyond the bootstrap
        if start < a:
            start = a  # pair (a, j) with j >= a, counted once
        nxt[a] = start * a
    block = np.int64(1 << 14)
    l = np.int64(boot + 1)
    while l <= N:
        blk = min(block, l - 1)  # keep r < 2l so every cofactor is final
        r = min(np.int64(N), l + blk - 1)
        for a in range(2, sq + 1):
            if a * a > r:
                break
            v = nxt[a]
            fa = np.int64(f[a])
            while v <= r:
                c = fa + np.int64(f[v // a])
                if c < np.int64(f[v]):
                    f[v] = np.uint8(c)
                v += a
            nxt[a] = v
        capr = np.int64(max(16.0, np.float64(r) ** ell)) + 2
        block_additive_scan(f, l, r, capr, lb_small, lb_bnd, np.int64(1))
        l = r + 1


# ---------------------------------------------------------------------------
# single-target window engine
# ---------------------------------------------------------------------------


@njit(cache=True)
def plan_windows(n, n0, d_max, ell, pad, l_budget, uniform_l):
    """Enumerate distinct right endpoints r = n // d (d descending, so r
    ascending) and lay out each window's value range and guarantees."""
    count = 0
    prev = np.int64(-1)
    for d in range(d_max, 0, -1):
        r = n // d
        if r == prev:
            continue
        prev = r
        count += 1
    r_arr = np.empty(count, dtype=np.int64)
    lo_arr = np.empty(count, dtype=np.int64)
    guard_arr = np.empty(count, dtype=np.int64)
    off_arr = np.empty(count, dtype=np.int64)
    lconv_arr = np.empty(count, dtype=np.int64)
    total = np.int64(0)
    i = 0
    prev = np.int64(-1)
    for d in range(d_max, 0, -1):
        r = n // d
        if r == prev:
            continue
        prev = r
        if uniform_l:
            L = np.int64(np.float64(n) ** ell) + 1
        else:
            L = np.int64(np.float64(r) ** ell) + 1
        if L > l_budget:
            L = l_budget
        if L < 18:
            L = 18
        W = 4 * L + pad
        lo = r - W
        if lo < 1:
            lo = 1
        r_arr[i] = r
        lo_arr[i] = lo
        guard_arr[i] = r - 3 * L
        lconv_arr[i] = L + pad
        off_arr[i] = total
        total += r - lo + 1
        i += 1
    return r_arr, lo_arr, guard_arr, off_arr, lconv_arr, total


@njit(cache=True)
def fill_idx_by_d(n, d_max, r_arr):
    """idx_by_d[d] = index of the window whose key is n // d."""
    idx = np.empty(d_max + 1, dtype=np.int64)
    i = 0
    for d in range(d_max, 0, -1):
        r = n // d
        while i + 1 < r_arr.shape[0] and r_arr[i] < r:
            i += 1
        idx[d] = i
    return idx


@njit(cache=True)
def run_windows(
    n,
    n0,
    prefix,
    r_arr,
    lo_arr,
    guard_arr,
    off_arr,
    lconv_arr,
    idx_by_d,
    pool,
    fp_pool,
    keep_fprime,
    primes,
    lb_small,
    lb_bnd,
    err,
):
    """Process every window in dependency order (r ascending).

    Phase A factors each value in the window and minimizes over divisor pairs
    (reads resolve in the prefix or in the guaranteed range of an earlier
    window); phase B folds in additions of a small prefix term through the
    truncated (min,+)-convolution. Finished f slices land in `pool`.
    """
    nwin = r_arr.shape[0]
    wmax = 0
    for w in range(nwin):
        width = r_arr[w] - lo_arr[w] + 1
        if width > wmax:
            wmax = width
    fprime = np.empty(wmax, dtype=np.uint8)
    fvals = np.empty(wmax, dtype=np.uint8)
    cof = np.empty(wmax, dtype=np.int64)
    nfac = np.empty(wmax, dtype=np.int64)
    pfac = np.empty((wmax, MAX_DISTINCT), dtype=np.int64)
    efac = np.empty((wmax, MAX_DISTINCT), dtype=np.int64)
    divbuf = np.empty(DIV_BUF_LEN, dtype=np.int64)
    pb = np.empty(MAX_DISTINCT, dtype=np.int64)
    eb = np.empty(MAX_DISTINCT, dtype=np.int64)
    n_primes = primes.shape[0]
    plim = primes[n_primes - 1]

    for w in range(nwin):
        r = r_arr[w]
        lo = lo_arr[w]
        width = r - lo + 1
        lconv = lconv_arr[w]
        sq = _isqrt64(r)

        for i in range(width):
            cof[i] = lo + i
            nfac[i] = 0
        for pi in range(n_primes):
            p = primes[pi]
            if p > sq:
                break
            start = ((lo + p - 1) // p) * p
            if start < p * 2:
                start = p * 2
            for v in range(start, r + 1, p):
                i = v - lo
                c = cof[i]
                e = 0
                while c % p == 0:
                    c //= p
                    e += 1
                if e > 0:
                    cof[i] = c
                    k = nfac[i]
                    pfac[i, k] = p
                    efac[i, k] = e
                    nfac[i] = k + 1
        sieved_all = plim >= sq

        for i in range(width):
            v = lo + i
            if v == 1:
                fprime[i] = 1
                continue
            c = cof[i]
            if c > 1:
                if sieved_all or c <= plim * plim or is_prime_u64(c):
                    k = nfac[i]
                    if k >= MAX_DISTINCT:
                        err[0] = ERR_FACBUF
                        return np.int64(-1)
                    pfac[i, k] = c
                    efac[i, k] = 1
                    nfac[i] = k + 1
                else:
                    fcnt = factorize_u64(c, pb, eb)
                    if fcnt < 0:
                        err[0] = ERR_RHO
                        err[1] = c
                        return np.int64(-1)
                    k = nfac[i]
                    for t in range(fcnt):
                        if k >= MAX_DISTINCT:
                            err[0] = ERR_FACBUF
                            return np.int64(-1)
                        pfac[i, k] = pb[t]
                        efac[i, k] = eb[t]
                        k += 1
                    nfac[i] = k
            sv = _isqrt64(v)
            cnt = 1
            divbuf[0] = 1
            nf = nfac[i]
            for t in range(nf):
                p = pfac[i, t]
                emax = efac[i, t]
                cur = cnt
                for s in range(cur):
                    base = divbuf[s]
                    pk = np.int64(1)
                    for _e in range(emax):
                        if pk > sv // p:
                            break
                        pk *= p
                        d2 = base * pk
                        if d2 > sv:
                            break
                        if cnt >= DIV_BUF_LEN:
                            err[0] = ERR_DIVBUF
                            return np.int64(-1)
                        divbuf[cnt] = d2
                        cnt += 1
            best = np.int64(300)
            for s in range(1, cnt):
                j = divbuf[s]
                m = v // j
                fj = np.int64(prefix[j])
                if m <= n0:
                    fm = np.int64(prefix[m])
                else:
                    key = r // j
                    w2 = idx_by_d[n // key]
                    if m < guard_arr[w2]:
                        err[0] = ERR_GUARD
                        err[1] = v
                        err[2] = j
                        return np.int64(-1)
                    fm = np.int64(pool[off_arr[w2] + (m - lo_arr[w2])])
                if fm >= 255:
                    continue
                c2 = fj + fm
                if c2 < best:
                    best = c2
            fprime[i] = np.uint8(best if best < 255 else 255)

        lmax = lb_small.shape[0] - 1
        for i in range(width):
            v = lo + i
            if v <= n0:
                fvals[i] = prefix[v]
                continue
            best = np.int64(fprime[i])
            bmax = min(lconv, np.int64(i))
            if bmax >= 1:
                base = _lb_of(v - bmax, lb_bnd)
                for b in range(1, bmax + 1):
                    if b <= lmax and np.int64(lb_small[b]) + base >= best:
                        break
                    fp = np.int64(fprime[i - b])
                    if fp >= 255:
                        continue
                    c3 = np.int64(prefix[b]) + fp
                    if c3 < best:
                        best = c3
            fvals[i] = np.uint8(best if best < 255 else 255)

        off = off_arr[w]
        for i in range(width):
            pool[off + i] = fvals[i]
        if keep_fprime:
            for i in range(width):
                fp_pool[off + i] = fprime[i]

    last = nwin - 1
    ans = pool[off_arr[last] + (n - lo_arr[last])]
    if ans >= np.uint8(255):
        err[0] = ERR_CEILING
        return np.int64(-1)
    return np.int64(ans)
