"""Witness expressions over {1, +, *}: reconstruction from a finished engine
run, rendering, and an independent parser/verifier.

Reconstruction ties are broken deterministically: a multiplication split is
preferred over an addition, and among splits the smallest factor (or smallest
addendum) wins, so the same run always prints the same tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from . import factorization
from .all_targets import ComplexityTable
from .bounds import INFINITY
from .single_target import SingleTargetRun


@dataclass(frozen=True)
class ExpressionTree:
    op: str  # "one" | "add" | "mul"
    left: Optional["ExpressionTree"]
    right: Optional["ExpressionTree"]
    value: int
    ones: int


ONE = ExpressionTree("one", None, None, 1, 1)


def add(a: ExpressionTree, b: ExpressionTree) -> ExpressionTree:
    return ExpressionTree("add", a, b, a.value + b.value, a.ones + b.ones)


def mul(a: ExpressionTree, b: ExpressionTree) -> ExpressionTree:
    return ExpressionTree("mul", a, b, a.value * b.value, a.ones + b.ones)


class ChoicesMissing(RuntimeError):
    """The engine run kept no reconstruction state; re-run with recording."""


def render(tree: ExpressionTree) -> str:
    """Fully parenthesized ASCII form using '1', '+', '*'."""
    parts = []
    _render_into(tree, parts)
    return "".join(parts)


def _render_into(t: ExpressionTree, out: list) -> None:
    if t.op == "one":
        out.append("1")
        return
    out.append("(")
    _render_into(t.left, out)
    out.append("+" if t.op == "add" else "*")
    _render_into(t.right, out)
    out.append(")")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def verify(text: str) -> Tuple[int, int]:
    """Parse an expression over {1, +, *} ('·' accepted for '*'); return its
    exact value and 1-count."""
    s = text.strip().replace("·", "*").replace("\\cdot", "*")
    pos = 0

    def peek() -> str:
        nonlocal pos
        while pos < len(s) and s[pos] in " \t\n":
            pos += 1
        return s[pos] if pos < len(s) else ""

    def expr() -> Tuple[int, int]:
        v, o = term()
        while peek() == "+":
            nonlocal pos
            pos += 1
            v2, o2 = term()
            v, o = v + v2, o + o2
        return v, o

    def term() -> Tuple[int, int]:
        v, o = factor()
        while peek() == "*":
            nonlocal pos
            pos += 1
            v2, o2 = factor()
            v, o = v * v2, o + o2
        return v, o

    def factor() -> Tuple[int, int]:
        nonlocal pos
        c = peek()
        if c == "1":
            pos += 1
            if pos < len(s) and s[pos].isdigit():
                raise ParseError("only the digit 1 is allowed", pos)
            return 1, 1
        if c == "(":
            pos += 1
            v, o = expr()
            if peek() != ")":
                raise ParseError("expected ')'", pos)
            pos += 1
            return v, o
        raise ParseError(f"unexpected {c!r}" if c else "unexpected end", pos)

    v, o = expr()
    if peek() != "":
        raise ParseError(f"trailing input {s[pos]!r}", pos)
    return v, o


def reconstruct(n: int, source: Union[ComplexityTable, SingleTargetRun]) -> ExpressionTree:
    """Minimal expression for n from a finished engine run."""
    if isinstance(source, ComplexityTable):
        if not source.record_choices:
            raise ChoicesMissing(
                "table was built without choice recording; "
                "re-run compute_table with record_choices=True"
            )
        if not 1 <= n <= source.N:
            raise ValueError(f"n={n} outside the table range")
        return _from_table(n, source.values)
    if isinstance(source, SingleTargetRun):
        if source.backend == "table":
            return _from_table(n, source.prefix)
        if (source.windows is None) and (source.pools is None):
            raise ChoicesMissing(
                "run kept no window state; re-run compute_single with keep_run=True"
            )
        if n != source.plan.n:
            raise ValueError("a single-target run can only witness its own target")
        return _from_run(source)
    raise TypeError("source must be a ComplexityTable or SingleTargetRun")


def _from_table(n: int, values: np.ndarray) -> ExpressionTree:
    memo: dict = {}

    def build(v: int) -> ExpressionTree:
        if v == 1:
            return ONE
        got = memo.get(v)
        if got is not None:
            return got
        fv = int(values[v])
        tree = None
        for j in _ordered_divpairs(v):
            if int(values[j]) + int(values[v // j]) == fv:
                tree = mul(build(j), build(v // j))
                break
        if tree is None:
            half = v // 2
            cand = values[1 : half + 1].astype(np.int32) + values[v - 1 : v - half - 1 : -1]
            hits = np.nonzero(cand == fv)[0]
            if hits.size == 0:
                raise RuntimeError(f"no achieving split found for {v}; table corrupt?")
            i = int(hits[0]) + 1
            tree = add(build(i), build(v - i))
        memo[v] = tree
        return tree

    return build(n)


def _ordered_divpairs(v: int):
    out = []
    for a in range(2, math.isqrt(v) + 1):
        if v % a == 0:
            out.append(a)
    return out


def _from_run(run: SingleTargetRun) -> ExpressionTree:
    n0 = run.plan.n0
    prefix = run.prefix

    def build_small(v: int) -> ExpressionTree:
        return _from_table(v, prefix)

    def build(v: int, key: int) -> ExpressionTree:
        if v <= n0:
            return build_small(v)
        fv = run.f_of(v, key)
        t = _try_mul(v, key, fv)
        if t is not None:
            return t
        # addition: smallest prefix addendum b with f(b) + f'(v-b) = f(v)
        lconv = _lconv_for(run, key)
        for b in range(1, min(lconv, v - 1) + 1):
            w = v - b
            fp = run.fprime_of(w, key)
            if fp != INFINITY and int(prefix[b]) + fp == fv:
                return add(build_small(b), _mul_split(w, key, fp))
        raise RuntimeError(f"no achieving split found for {v} in window {key}")

    def _try_mul(v: int, key: int, target: int) -> Optional[ExpressionTree]:
        for j in sorted(_small_divisors_of(v)):
            m = v // j
            fm = run.f_of(m, key // j) if m > n0 else int(prefix[m])
            if fm != INFINITY and int(prefix[j]) + fm == target:
                return mul(build_small(j), build(m, key // j))
        return None

    def _mul_split(w: int, key: int, fp: int) -> ExpressionTree:
        if w == 1:
            return ONE
        t = _try_mul(w, key, fp)
        if t is None:
            raise RuntimeError(f"no multiplication split matches f'({w})")
        return t

    return build(run.plan.n, run.plan.n)


def _lconv_for(run: SingleTargetRun, key: int) -> int:
    if run.backend == "python":
        return run.windows[key].lconv
    from .single_target import PAD, _window_L

    return _window_L(run.plan, key) + PAD


def _small_divisors_of(v: int):
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
    return [d for d in divs if 2 <= d <= sv]
