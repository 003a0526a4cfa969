import math

import numpy as np
import pytest

from intcomplexity import bounds
from intcomplexity.all_targets import naive_oracle


def test_lower_bound_examples():
    assert bounds.lower_bound(1) == 0
    assert bounds.lower_bound(9) == 6
    assert bounds.lower_bound(10) == 7


def test_lower_bound_exact_at_powers_of_three():
    for k in range(1, 40):
        n = 3**k
        assert bounds.lower_bound(n) == 3 * k
        assert bounds.lower_bound(n + 1) == 3 * k + 1


def test_upper_bound_examples():
    assert bounds.upper_bound(3) == 4
    assert bounds.upper_bound(9) == 8
    assert bounds.upper_bound(2) == 2


def test_upper_bound_rejects_one():
    with pytest.raises(ValueError):
        bounds.upper_bound(1)


def test_addendum_limit_examples():
    assert bounds.addendum_limit(1) == 16
    assert bounds.addendum_limit(10**6) == 178


def test_addendum_limit_floor_and_power():
    lm = bounds.DEFAULT_LIMITS
    for n in (1, 2, 17, 1000, 12345, 10**7):
        r = bounds.addendum_limit(n, lm)
        assert r >= 16
        assert r >= n**lm.ell - 1e-9


def test_limits_derived_quantities():
    lm = bounds.Limits()
    assert lm.ell == pytest.approx(0.375)
    assert lm.t == pytest.approx(1 / (2 - 0.375))
    lm2 = bounds.Limits(alpha=4.2)
    assert lm2.ell == pytest.approx(0.4)
    assert lm2.t == pytest.approx(1 / 1.6)


def test_limits_override_replaces_alpha():
    lm = bounds.Limits(alpha=4.125, alpha0_override=4.3)
    assert lm.effective_alpha == 4.3
    assert lm.ell == pytest.approx(4.3 / 3 - 1)


def test_limits_invariants_enforced():
    with pytest.raises(ValueError):
        bounds.Limits(alpha=3.0)
    with pytest.raises(ValueError):
        bounds.Limits(alpha=5.0)
    with pytest.raises(ValueError):
        bounds.Limits(alpha=4.6)  # ell would reach 0.533


def test_monotonicity():
    prev = 0
    for n in range(1, 20000):
        lb = bounds.lower_bound(n)
        assert lb >= prev
        prev = lb
        if n >= 2:
            assert bounds.upper_bound(n) >= lb


def test_bounds_sandwich_oracle_range():
    table = naive_oracle(100_000)
    lb_bnd = np.array(
        bounds.lb_thresholds(bounds.upper_bound(100_000) + 4), dtype=np.int64
    )
    n = np.arange(2, 100_001, dtype=np.int64)
    lbs = np.searchsorted(lb_bnd, n, side="left")
    v = table.values[2:].astype(np.int64)
    assert (lbs <= v).all()
    ub_bnd = np.array(bounds.ub_thresholds(bounds.upper_bound(100_000) + 2), dtype=np.int64)
    ubs = np.searchsorted(ub_bnd, n, side="right") - 1
    assert (v <= ubs).all()


def test_addendum_soundness_minimal_witness():
    # every n <= 20000 with an additive optimum has a witness addendum
    # within addendum_limit(n)
    table = naive_oracle(20000)
    f = table.values.astype(np.int32)
    for n in range(2, 20001):
        half = n // 2
        cand = f[1 : half + 1] + f[n - 1 : n - half - 1 : -1]
        best_add = int(cand.min()) if half >= 1 else 1 << 30
        if best_add == f[n]:
            i = int(np.nonzero(cand == best_add)[0][0]) + 1
            assert i <= bounds.addendum_limit(n)


def test_threshold_tables_match_scalar_functions():
    lt = bounds.lb_thresholds(40)
    for n in (1, 2, 3, 8, 9, 10, 26, 27, 28, 100, 12345):
        k = bounds.lower_bound(n)
        assert lt[k] >= n
        if k > 0:
            assert lt[k - 1] < n
    ut = bounds.ub_thresholds(40)
    for n in (2, 3, 9, 10, 80, 81, 82, 6561):
        k = bounds.upper_bound(n)
        assert ut[k] <= n
        if k + 1 < len(ut):
            assert ut[k + 1] > n
