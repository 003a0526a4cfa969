"""Single-target engine: one f(n) in sublinear time.

Precompute f over a prefix [1, n0], then walk windows [r - W, r] for every
distinct right endpoint r = n // d, d = n//n0 .. 1.  Within a window, phase A
sets the multiplication-last value f'(v) from divisor pairs (small factors
resolve in the prefix, large cofactors in the guaranteed range of an earlier
window), and phase B folds additions of a small prefix term back in with a
truncated (min,+)-convolution.  The answer is read from the d = 1 window.

Two width policies: per-window widths ~4*(n/d)**ell (default) or one uniform
width ~4*n**ell paired with the larger prefix exponent t = alpha/6
("global_L").  Fast mode additionally shrinks widths to what a certified
upper-bound budget can ever use and caps the prefix at a practical size;
outputs are identical either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from . import factorization
from .all_targets import _lb_bound_array, _small_lb_table, compute_table
from .bounds import (DEFAULT_LIMITS, INFINITY, Limits, ipow_ceil,
                     lb_thresholds, lower_bound, upper_bound)

try:
    from . import _kernels
except Exception:  # pragma: no cover
    _kernels = None

PAD = 8
MAX_TARGET_BITS = 127
FAST_INT_BITS = 62  # numba path bound; larger targets use the bigint path
MIN_BUDGET_L = 18   # narrowest window half-axis that keeps lookups guaranteed
_SMALL_TABLE_CUTOFF = 250_000
_PREFIX_CACHE_MAX = 220_000_000
_SIEVE_PRIME_BOUND = 10_000


class GuaranteeViolation(RuntimeError):
    """A cross-window lookup fell below the target window's guaranteed range."""


_prefix_cache: dict = {}


def clear_prefix_cache() -> None:
    _prefix_cache.clear()


def get_prefix(size: int, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """f(0..size) as uint8 (index 0 unused); cached, largest table wins."""
    key = limits.effective_alpha
    cached = _prefix_cache.get(key)
    if cached is not None and cached.shape[0] >= size + 1:
        return cached[: size + 1]
    values = _build_prefix(size, limits)
    if size <= _PREFIX_CACHE_MAX:
        _prefix_cache[key] = values
    return values


def _build_prefix(size: int, limits: Limits) -> np.ndarray:
    if _kernels is None or size <= _SMALL_TABLE_CUTOFF:
        return compute_table(size, limits, engine="capped").values
    f = np.full(size + 1, INFINITY, dtype=np.uint8)
    lb_small = _small_lb_table(max(64, ipow_ceil(size, limits.ell) + 8))
    lb_bnd = _lb_bound_array(size)
    _kernels.prefix_scan(f, size, limits.ell, lb_small, lb_bnd)
    return f


@dataclass(frozen=True)
class WindowPlan:
    """Prefix size and window layout parameters for one target."""

    n: int
    n0: int
    d_max: int
    pad: int
    mode: str
    fast: bool
    l_budget: int  # uniform cap on window half-axis L (huge when not pruning)
    uniform_l: bool
    limits: Limits


@dataclass
class Window:
    """One materialized interval [max(1, r-W), r] (python path)."""

    d: int
    r: int
    W: int
    lo: int
    guaranteed_from: int
    lconv: int
    f_vals: np.ndarray
    fprime_vals: np.ndarray


@dataclass
class SingleTargetRun:
    """Result of compute_single with enough state retained for witnesses."""

    plan: WindowPlan
    value: int
    prefix: np.ndarray
    backend: str  # "table" | "python" | "numba"
    windows: Optional[Dict[int, Window]] = None
    pools: Optional[dict] = None

    def f_of(self, v: int, key: int) -> int:
        """f(v) as seen by the engine; key is the window right endpoint."""
        if v <= self.plan.n0:
            return int(self.prefix[v])
        return self._win_read(v, key, use_fprime=False)

    def fprime_of(self, v: int, key: int) -> int:
        if v == 1:
            return 1
        return self._win_read(v, key, use_fprime=True)

    def _win_read(self, v: int, key: int, use_fprime: bool) -> int:
        if self.backend == "python":
            w = self.windows[key]
            arr = w.fprime_vals if use_fprime else w.f_vals
            return int(arr[v - w.lo])
        if self.backend == "numba":
            p = self.pools
            idx = int(p["idx_by_d"][self.plan.n // key])
            off = int(p["off"][idx])
            lo = int(p["lo"][idx])
            arr = p["fp_pool"] if use_fprime else p["pool"]
            return int(arr[off + (v - lo)])
        raise ValueError("run retained no windows")


_CUB_TABLE_SIZE = 1 << 16


def certified_upper_bound(n: int, limits: Limits = DEFAULT_LIMITS,
                          _memo: Optional[dict] = None) -> int:
    """Cheap constructive bound on f(n): exact below a small table, else the
    product over prime factors, with f(p) <= f(p-1) + 1 for primes.

    Every step is a real expression construction, so the bound is certified
    and safe to use as a fast-mode pruning budget.
    """
    if _memo is None:
        _memo = {}
    got = _memo.get(n)
    if got is not None:
        return got
    if n <= _CUB_TABLE_SIZE:
        out = int(get_prefix(_CUB_TABLE_SIZE, limits)[n])
    else:
        fm = factorization.factorize(n)
        if len(fm) == 1 and sum(fm.values()) == 1:  # n prime
            out = certified_upper_bound(n - 1, limits, _memo) + 1
        else:
            out = sum(
                e * certified_upper_bound(p, limits, _memo)
                for p, e in fm.items()
            )
    _memo[n] = out
    return out


def _safe_n0_floor(limits: Limits) -> int:
    """Smallest prefix that keeps every cross-window lookup inside the
    guaranteed range (worst divisor j = 2), doubled for slack."""
    ell = limits.ell
    denom = 3.0 - 2.0 ** (1.0 + ell)
    lstar = ((PAD + 1) / 2.0 + 1.0) / denom
    return max(100, 2 * math.ceil(lstar ** (1.0 / ell)))


def _l_budget(n: int, n0: int, d_max: int, limits: Limits, ub: int,
              uniform_l: bool) -> int:
    """Largest addendum any expression within the certified bound ub can use.

    A chain through addendum b at window d costs at least
    f(b) + lower_bound((lo_d - Lconv_d) * d); bound that product from below
    over all windows and convert the slack back to an index cap.
    """
    ell = limits.ell
    l_ref = ipow_ceil(n, ell) + 1
    if uniform_l:
        lmax = float(l_ref)
    else:
        lmax = float(n0) ** ell + 1
    worst = d_max * (5.0 * lmax + 2 * PAD + 1) * 1.5 + 16
    M = n - int(worst)
    if M < 2:
        return l_ref  # no useful budget; fall back to reference widths
    slack = ub - lower_bound(M)
    if slack <= 0:
        slack = 0
    thresholds = lb_thresholds(min(slack, 1300))
    cap_b = thresholds[slack] if slack < len(thresholds) else 1 << 40
    return max(MIN_BUDGET_L, min(cap_b, l_ref))


def _feasible_prefix_cap() -> int:
    """Hard ceiling on prefix length: fail cleanly instead of thrashing."""
    try:
        import psutil

        return min(int(psutil.virtual_memory().available * 0.6), 6_000_000_000)
    except Exception:  # pragma: no cover
        return 2_000_000_000


def _auto_n0_cap(n: int, d_est_width: int) -> int:
    """Fast-mode prefix cap sized from available memory: start with a third
    of the budget for the prefix and halve until prefix + window pool fit."""
    try:
        import psutil

        avail = psutil.virtual_memory().available
    except Exception:  # pragma: no cover
        avail = 4 << 30
    budget = min(int(avail * 0.45), 3_000_000_000)
    n0 = (budget * 11) // 20
    while n0 > (1 << 20):
        need = n0 + (n // n0) * (d_est_width + 10)
        if need <= budget:
            break
        n0 //= 2
    return max(n0, 1 << 20)


def plan_for(
    n: int,
    limits: Limits = DEFAULT_LIMITS,
    mode: str = "per_window_L",
    fast: bool = False,
    ub_hint: Optional[int] = None,
) -> WindowPlan:
    if mode not in ("per_window_L", "global_L"):
        raise ValueError("mode must be per_window_L or global_L")
    if n < 1:
        raise ValueError("n must be positive")
    if int(n).bit_length() > MAX_TARGET_BITS:
        raise ValueError("targets above 2**127 are unsupported")
    n = int(n)
    ell = limits.ell
    uniform_l = mode == "global_L"
    t = (limits.effective_alpha / 6.0) if uniform_l else limits.t

    base = max(
        4 * ipow_ceil(n, ell) + PAD,
        math.isqrt(n) + 1,
        _safe_n0_floor(limits),
        100,
    )
    nt = int(math.exp(t * math.log(n))) + 1 if n > 1 else 1

    l_budget = 1 << 40
    if fast and n > _CUB_TABLE_SIZE:
        ub = min(
            ub_hint if ub_hint is not None else 1 << 30,
            upper_bound(n, limits),
            certified_upper_bound(n, limits),
        )
    else:
        ub = ub_hint if ub_hint is not None else (
            upper_bound(n, limits) if n > 1 else 1
        )
    if fast:
        d_est = n // max(base, 1)
        width_est = 4 * MIN_BUDGET_L + PAD  # refined below
        cap = _auto_n0_cap(n, width_est)
        n0 = max(base, min(nt, max(cap, base)))
        d_max = max(1, n // n0)
        l_budget = _l_budget(n, n0, d_max, limits, ub, uniform_l)
        # re-derive the cap now that the true window width is known
        cap = _auto_n0_cap(n, 4 * l_budget + PAD + 1)
        n0 = max(base, min(nt, max(cap, base)))
    else:
        n0 = max(base, nt)

    cap = _feasible_prefix_cap()
    if n0 >= n:
        if n > cap:
            raise MemoryError(
                f"target {n} needs a prefix of {n} values; beyond this machine"
            )
        return WindowPlan(n, n, 0, PAD, mode, fast, l_budget, uniform_l, limits)
    d_max = n // n0
    if uniform_l:
        width_est = 4 * min(ipow_ceil(n, ell) + 1, l_budget) + PAD + 1
    else:
        width_est = 4 * min(ipow_ceil(n0, ell) + 1, l_budget) + PAD + 1
    need = n0 + d_max * (width_est + 9)
    if n0 > cap or need > 2 * cap:
        raise MemoryError(
            f"plan needs ~{need / 1e9:.1f} GB (prefix {n0}, {d_max} windows); "
            "the target is too large for this mode on this machine"
        )
    return WindowPlan(n, n0, d_max, PAD, mode, fast, l_budget, uniform_l, limits)


def _window_L(plan: WindowPlan, r: int) -> int:
    src = plan.n if plan.uniform_l else r
    L = int(float(src) ** plan.limits.ell) + 1
    if L > plan.l_budget:
        L = plan.l_budget
    return max(L, MIN_BUDGET_L)


def window_lookup(run: SingleTargetRun, v: int, d: int, j: int,
                  debug: bool = True) -> int:
    """f(v) for v = i/j reached from window d; asserts the nested-floor
    identity and that the read lands in the guaranteed range."""
    n = run.plan.n
    if v <= run.plan.n0:
        return int(run.prefix[v])
    key = (n // d) // j
    if debug and key != n // (d * j):
        raise AssertionError("nested-floor identity violated")
    if run.backend == "python":
        w = run.windows[key]
        if v < w.guaranteed_from:
            raise GuaranteeViolation(
                f"lookup of {v} below guaranteed_from={w.guaranteed_from} (r={key})"
            )
    return run.f_of(v, key)


def _run_python(plan: WindowPlan, keep_run: bool,
                lookup_hook: Optional[Callable] = None,
                debug_asserts: bool = True) -> SingleTargetRun:
    """Reference implementation: plain dict of windows, big-int capable."""
    n, n0 = plan.n, plan.n0
    prefix = get_prefix(n0, plan.limits)
    windows: Dict[int, Window] = {}
    prev_r = -1
    for d in range(plan.d_max, 0, -1):
        r = n // d
        if r == prev_r:
            continue
        prev_r = r
        L = _window_L(plan, r)
        W = 4 * L + PAD
        lo = max(1, r - W)
        width = r - lo + 1
        lconv = L + PAD
        fprime = np.full(width, INFINITY, dtype=np.uint8)
        for i in range(width):
            v = lo + i
            if v == 1:
                fprime[0] = 1
                continue
            best = 300
            for j in _small_divisors(v):
                m = v // j
                fj = int(prefix[j])
                if m <= n0:
                    fm = int(prefix[m])
                else:
                    key = r // j
                    w2 = windows[key]
                    if debug_asserts and key != n // (d * j):
                        raise AssertionError("nested-floor identity violated")
                    if m < w2.guaranteed_from:
                        raise GuaranteeViolation(
                            f"window d={d}: lookup {m} below guard of r'={key}"
                        )
                    if lookup_hook is not None:
                        lookup_hook(d, j, v, m, key, w2.guaranteed_from)
                    fm = int(w2.f_vals[m - w2.lo])
                if fm >= INFINITY:
                    continue
                c = fj + fm
                if c < best:
                    best = c
            fprime[i] = best if best < INFINITY else INFINITY
        fvals = np.empty(width, dtype=np.uint8)
        for i in range(width):
            v = lo + i
            if v <= n0:
                fvals[i] = prefix[v]
                continue
            best = int(fprime[i])
            for b in range(1, min(lconv, i) + 1):
                fp = int(fprime[i - b])
                if fp >= INFINITY:
                    continue
                c = int(prefix[b]) + fp
                if c < best:
                    best = c
            fvals[i] = best if best < INFINITY else INFINITY
        windows[r] = Window(d, r, W, lo, r - 3 * L, lconv, fvals, fprime)

    top = windows[n]
    value = int(top.f_vals[n - top.lo])
    if value >= INFINITY:
        raise OverflowError("complexity exceeds the representable ceiling")
    return SingleTargetRun(plan, value, prefix, "python",
                           windows=windows if keep_run else None)


def _small_divisors(v: int):
    """Divisors j of v with 2 <= j <= sqrt(v), ascending."""
    fm = factorization.factorize(v)
    sv = math.isqrt(v)
    divs = [1]
    for p, e in fm.items():
        cur = list(divs)
        pk = 1
        for _ in range(e):
            pk *= p
            if pk > sv:
                break
            divs.extend(d * pk for d in cur if d * pk <= sv)
    return sorted(d for d in divs if d >= 2)


def _run_numba(plan: WindowPlan, keep_run: bool) -> SingleTargetRun:
    n, n0 = plan.n, plan.n0
    prefix = get_prefix(n0, plan.limits)
    if not prefix.flags.c_contiguous:
        prefix = np.ascontiguousarray(prefix)
    r_arr, lo_arr, guard_arr, off_arr, lconv_arr, total = _kernels.plan_windows(
        n, n0, plan.d_max, plan.limits.ell, PAD,
        min(plan.l_budget, 1 << 40), plan.uniform_l,
    )
    idx_by_d = _kernels.fill_idx_by_d(n, plan.d_max, r_arr)
    pool = np.empty(int(total), dtype=np.uint8)
    fp_pool = np.empty(int(total) if keep_run else 1, dtype=np.uint8)
    primes = _sieve_primes(_SIEVE_PRIME_BOUND)
    lb_bnd = _lb_bound_array(min(n, 1 << 62))
    lb_small = _small_lb_table(int(lconv_arr.max()) + 2)
    err = np.zeros(4, dtype=np.int64)
    ans = _kernels.run_windows(
        n, n0, prefix, r_arr, lo_arr, guard_arr, off_arr, lconv_arr,
        idx_by_d, pool, fp_pool, keep_run, primes, lb_small, lb_bnd, err,
    )
    if ans < 0:
        code = int(err[0])
        if code == _kernels.ERR_GUARD:
            raise GuaranteeViolation(
                f"lookup of {int(err[1])}/{int(err[2])} fell below a guaranteed range"
            )
        if code == _kernels.ERR_CEILING:
            raise OverflowError("complexity exceeds the representable ceiling")
        raise RuntimeError(f"window kernel failed with code {code}, detail {int(err[1])}")
    pools = None
    if keep_run:
        pools = {"r": r_arr, "lo": lo_arr, "guard": guard_arr, "off": off_arr,
                 "idx_by_d": idx_by_d, "pool": pool, "fp_pool": fp_pool}
    return SingleTargetRun(plan, int(ans), prefix, "numba", pools=pools)


_primes_cache: dict = {}


def _sieve_primes(bound: int) -> np.ndarray:
    arr = _primes_cache.get(bound)
    if arr is None:
        sieve = np.ones(bound + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(bound) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        arr = np.nonzero(sieve)[0].astype(np.int64)
        _primes_cache[bound] = arr
    return arr


def compute_single(
    n: int,
    limits: Limits = DEFAULT_LIMITS,
    mode: str = "per_window_L",
    fast: bool = False,
    ub_hint: Optional[int] = None,
    keep_run: bool = False,
    force_python: bool = False,
    lookup_hook: Optional[Callable] = None,
    debug_asserts: bool = False,
):
    """f(n) for a single target. Returns the value, or the full run when
    keep_run is set (needed for witness reconstruction)."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if n.bit_length() > MAX_TARGET_BITS:
        raise ValueError("targets above 2**127 are unsupported")
    plan = plan_for(n, limits, mode, fast, ub_hint)
    if plan.d_max == 0:  # the prefix already covers n
        prefix = get_prefix(max(n, 2), limits)
        run = SingleTargetRun(plan, int(prefix[n]), prefix, "table")
        return run if keep_run else run.value
    use_numba = (
        _kernels is not None
        and not force_python
        and lookup_hook is None
        and not debug_asserts
        and n.bit_length() <= FAST_INT_BITS
    )
    if use_numba:
        run = _run_numba(plan, keep_run)
    else:
        run = _run_python(plan, keep_run, lookup_hook, debug_asserts=True)
    return run if keep_run else run.value
