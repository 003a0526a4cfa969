import math

import numpy as np
import pytest

from intcomplexity import single_target as stg
from intcomplexity.all_targets import naive_oracle
from intcomplexity.bounds import DEFAULT_LIMITS, lower_bound, upper_bound


@pytest.fixture(scope="module")
def oracle():
    return naive_oracle(100_000)


def test_paper_values():
    assert stg.compute_single(6) == 5
    assert stg.compute_single(1024) == 20


def test_tiny_targets():
    assert stg.compute_single(1) == 1
    assert stg.compute_single(2) == 2


def test_rejects_oversized_target():
    with pytest.raises(ValueError):
        stg.compute_single(1 << 128)


def test_oracle_agreement_sample(oracle):
    rng = np.random.default_rng(21)
    for n in rng.integers(2, 100_001, 400):
        n = int(n)
        assert stg.compute_single(n) == int(oracle.values[n]), n


def test_modes_and_fast_agree(oracle):
    rng = np.random.default_rng(22)
    for n in rng.integers(2, 100_001, 60):
        n = int(n)
        ref = int(oracle.values[n])
        for mode in ("per_window_L", "global_L"):
            for fast in (False, True):
                assert stg.compute_single(n, mode=mode, fast=fast) == ref, (n, mode, fast)


def test_python_backend_agrees(oracle):
    rng = np.random.default_rng(23)
    for n in rng.integers(2, 100_001, 25):
        n = int(n)
        assert stg.compute_single(n, force_python=True) == int(oracle.values[n]), n


def test_python_vs_numba_beyond_oracle():
    rng = np.random.default_rng(24)
    for n in rng.integers(10**5, 2 * 10**6, 6):
        n = int(n)
        assert stg.compute_single(n) == stg.compute_single(n, force_python=True), n


def test_bigint_path_agrees_midrange():
    # force the pure-python window path (the one that carries >2**62 targets)
    for n in (1_048_576 + 1, 2_000_003, 3_999_971):
        a = stg.compute_single(n)
        b = stg.compute_single(n, force_python=True)
        assert a == b, n


def test_plan_invariants():
    for n in (10**4, 10**6, 10**9, 10**12):
        for mode in ("per_window_L", "global_L"):
            plan = stg.plan_for(n, mode=mode)
            if plan.d_max == 0:
                assert plan.n0 >= n
                continue
            assert plan.n0 >= math.isqrt(n) + 1
            assert plan.n0 >= 4 * n**DEFAULT_LIMITS.ell + stg.PAD - 2
            assert plan.d_max == n // plan.n0


def test_window_count_bound():
    n = 10**8
    run = stg.compute_single(n, keep_run=True)
    plan = run.plan
    count = run.pools["r"].shape[0] if run.backend == "numba" else len(run.windows)
    assert count <= 2 * math.isqrt(n)
    assert count <= plan.d_max


def test_window_invariants_python_path():
    n = 5_000_017
    run = stg.compute_single(n, keep_run=True, force_python=True)
    oracle_tail = None
    for r, w in run.windows.items():
        assert w.lo == max(1, w.r - w.W)
        assert w.guaranteed_from <= w.r
        # guaranteed range respects the global bounds
        for v in range(max(w.guaranteed_from, 2), w.r + 1):
            fv = int(w.f_vals[v - w.lo])
            assert lower_bound(v) <= fv <= upper_bound(v), (r, v, fv)


def test_lookups_stay_guaranteed_instrumented():
    events = []

    def hook(d, j, v, m, key, guard):
        events.append((d, j, v, m, key, guard))
        assert m >= guard

    rng = np.random.default_rng(25)
    for n in rng.integers(10**6, 10**7, 3):
        stg.compute_single(int(n), force_python=True, lookup_hook=hook,
                           debug_asserts=True)
    assert events  # cross-window lookups actually happened


def test_containment_inequality_on_lookups():
    # 4*(n/d)^ell / j + 1 <= 3*(n/(d*j))^ell + PAD for every observed lookup
    ell = DEFAULT_LIMITS.ell
    checked = 0

    def hook(d, j, v, m, key, guard):
        nonlocal checked
        r = v // 1  # v lies in window with endpoint n//d
        lhs = 4.0 * float(key * j) ** ell / j + 1.0
        rhs = 3.0 * float(key) ** ell + stg.PAD
        assert lhs <= rhs + 1e-6
        checked += 1

    stg.compute_single(9_999_991, force_python=True, lookup_hook=hook)
    assert checked


def test_ub_hint_budget_is_exact(oracle):
    # a certified hint must never change the answer
    rng = np.random.default_rng(26)
    for n in rng.integers(1000, 100_001, 40):
        n = int(n)
        ref = int(oracle.values[n])
        assert stg.compute_single(n, fast=True, ub_hint=upper_bound(n)) == ref
        assert stg.compute_single(n, fast=True, ub_hint=ref) == ref


def test_window_lookup_routing():
    n = 10**7 + 19
    run = stg.compute_single(n, keep_run=True, force_python=True)
    # values at or below n0 route to the prefix
    assert stg.window_lookup(run, run.plan.n0 - 1, 1, 1) == int(
        run.prefix[run.plan.n0 - 1]
    )
    # a window right endpoint is always defined
    some_r = sorted(run.windows)[len(run.windows) // 2]
    d = n // some_r
    assert stg.window_lookup(run, some_r, d, 1) == int(
        run.windows[some_r].f_vals[some_r - run.windows[some_r].lo]
    )


def test_prefix_cache_reuse():
    stg.clear_prefix_cache()
    a = stg.get_prefix(10_000)
    b = stg.get_prefix(5_000)
    assert b.base is a or b is a[: 5_001]  # view into the cached table
    assert (a[: 5_001] == b).all()
    stg.clear_prefix_cache()
