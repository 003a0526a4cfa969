import pytest

from intcomplexity import conjectures as cj
from intcomplexity.all_targets import naive_oracle
from intcomplexity.single_target import compute_single


def test_collapse_base3_examples():
    report = cj.check_collapse(3, 10)
    assert report.collapsed_at is None
    assert not report.truncated
    assert report.status == "NoCollapseUpTo(10)"
    for row in report.rows:
        assert row.f_power == 3 * row.exponent


def test_collapse_subadditive_rows():
    report = cj.check_collapse(7, 8)
    f7 = report.f_base
    prev = 0
    for row in report.rows:
        assert row.f_power <= row.exponent * f7
        assert row.f_power >= prev  # powers grow
        prev = row.f_power


def test_collapse_truncates_on_overflow(monkeypatch):
    # no desk-scale base can walk all the way to the 2**127 ceiling, so stub
    # the evaluator and check the truncation bookkeeping itself
    monkeypatch.setattr(cj, "compute_single", lambda n, **kw: kw.get("ub_hint", 3))
    report = cj.check_collapse(5, 80)  # 5^56 > 2^127
    assert report.truncated
    assert len(report.rows) < 56
    assert "TruncatedAt" in report.status


def test_infeasible_target_raises_cleanly():
    with pytest.raises(MemoryError):
        cj.check_collapse(2**40 + 1, 6)


def test_collapse_budget_truncates():
    report = cj.check_collapse(733, 6, budget_seconds=0.0)
    assert report.truncated


def test_collapse_csv_shape():
    report = cj.check_collapse(5, 4)
    lines = report.to_csv().strip().split("\n")
    assert lines[0] == "base,exponent,f_power,product_bound,status"
    assert len(lines) == 1 + len(report.rows)


def test_family_members_pow235():
    members = cj.family_members("pow235", 100)
    values = [m for m, _ in members]
    assert values == sorted(values)
    assert (5, 5) in members and (40, 11) in members
    assert all(m > 1 for m, _ in members)
    # k <= 5 restriction: 5^6 would enter only above 15625
    big = cj.family_members("pow235", 5**6)
    assert all(m % 5**6 != 0 for m, _ in big)


def test_family_members_pow2plus1_skips_exceptions():
    members = cj.family_members("pow2plus1", 2**12 + 1)
    values = [m for m, _ in members]
    assert 9 not in values and 513 not in values
    assert 3 in values and 5 in values and 4097 in values


def test_family_checks_small():
    assert cj.check_family("pow2", 2**20) == []
    assert cj.check_family("pow235", 10**4) == []
    assert cj.check_family("pow2plus1", 2**12 + 1) == []


def test_family_expected_values_against_oracle():
    table = naive_oracle(10_000)
    for member, expected in cj.family_members("pow235", 10_000):
        assert int(table.values[member]) == expected, member


def test_family_csv():
    text = cj.family_csv("pow2", 100, [(64, 11, 12)])
    assert text.splitlines()[0] == "member,value_f,expected,status"
    assert "64,11,12,violation" in text


def test_family_rejects_unknown():
    with pytest.raises(ValueError):
        cj.family_members("pow7", 100)


@pytest.mark.extended
@pytest.mark.parametrize("base,expect", [(991, 6), (257, 5), (757, 6)])
def test_extended_collapse_bases(base, expect):
    report = cj.check_collapse(base, expect)
    assert report.collapsed_at == expect
