import pathlib

import pytest

from intcomplexity import witness as wt
from intcomplexity.all_targets import compute_table
from intcomplexity.single_target import compute_single

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

APPENDIX = [
    ("witness_733pow6.txt", 733**6, 119),
    ("witness_379pow6.txt", 379**6, 107),
    ("witness_739pow6.txt", 739**6, 119),
    ("witness_541pow6.txt", 541**6, 113),
    ("witness_577pow12.txt", 577**12, 227),
    ("witness_811pow9.txt", 811**9, 179),
]


def test_verify_basics():
    assert wt.verify("1") == (1, 1)
    assert wt.verify("(1+1)*(1+1+1)") == (6, 5)
    assert wt.verify("((1+1)*(1+1+1))") == (6, 5)


def test_verify_accepts_cdot_variants():
    assert wt.verify("(1+1)·(1+1+1)") == (6, 5)


def test_parse_errors_carry_position():
    with pytest.raises(wt.ParseError):
        wt.verify("(1+1")
    with pytest.raises(wt.ParseError):
        wt.verify("1+2")
    with pytest.raises(wt.ParseError):
        wt.verify("(1+1))")
    with pytest.raises(wt.ParseError):
        wt.verify("")


@pytest.mark.parametrize("fname,value,ones", APPENDIX)
def test_appendix_fixtures_roundtrip(fname, value, ones):
    text = (FIXTURES / fname).read_text()
    assert wt.verify(text) == (value, ones)


def test_tree_invariants():
    t = wt.mul(wt.add(wt.ONE, wt.ONE), wt.add(wt.ONE, wt.add(wt.ONE, wt.ONE)))
    assert t.value == 6 and t.ones == 5
    assert wt.verify(wt.render(t)) == (6, 5)


def test_reconstruct_requires_recording():
    table = compute_table(50)
    with pytest.raises(wt.ChoicesMissing):
        wt.reconstruct(6, table)


def test_reconstruct_six():
    table = compute_table(10, record_choices=True)
    tree = wt.reconstruct(6, table)
    assert tree.value == 6 and tree.ones == 5


def test_render_verify_identity_table_sweep():
    table = compute_table(10_000, record_choices=True)
    for n in range(1, 10_001):
        tree = wt.reconstruct(n, table)
        value, ones = wt.verify(wt.render(tree))
        assert value == n
        assert ones == int(table.values[n]), n


def test_reconstruct_deterministic():
    table = compute_table(500, record_choices=True)
    first = [wt.render(wt.reconstruct(n, table)) for n in range(1, 501)]
    second = [wt.render(wt.reconstruct(n, table)) for n in range(1, 501)]
    assert first == second


def test_single_target_witness_numba():
    n = 987_654_323
    run = compute_single(n, keep_run=True)
    tree = wt.reconstruct(n, run)
    assert tree.value == n and tree.ones == run.value
    assert wt.verify(wt.render(tree)) == (n, run.value)


def test_single_target_witness_python():
    n = 1_000_003
    run = compute_single(n, keep_run=True, force_python=True)
    tree = wt.reconstruct(n, run)
    assert tree.value == n and tree.ones == run.value


def test_witness_requires_run_state():
    n = 1_000_003
    run = compute_single(n, keep_run=False)
    assert isinstance(run, int)
    bare = compute_single(n, keep_run=True)
    bare2 = type(bare)(plan=bare.plan, value=bare.value, prefix=bare.prefix,
                       backend="numba", windows=None, pools=None)
    with pytest.raises(wt.ChoicesMissing):
        wt.reconstruct(n, bare2)
