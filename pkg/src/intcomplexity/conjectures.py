"""Desk-scale conjecture harness: power-collapse search and the f(2^i),
f(2^i 3^j 5^k), f(2^i + 1) family checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .bounds import DEFAULT_LIMITS, Limits
from .single_target import MAX_TARGET_BITS, compute_single

FAMILIES = ("pow2", "pow235", "pow2plus1")


@dataclass
class CollapseRow:
    exponent: int
    f_power: int
    product_bound: int  # i * f(base)

    @property
    def collapsed(self) -> bool:
        return self.f_power < self.product_bound


@dataclass
class CollapseReport:
    base: int
    f_base: int
    i_max: int
    rows: List[CollapseRow] = field(default_factory=list)
    collapsed_at: Optional[int] = None
    truncated: bool = False

    @property
    def status(self) -> str:
        if self.collapsed_at is not None:
            return f"Collapsed({self.collapsed_at})"
        if self.truncated:
            return f"TruncatedAt({len(self.rows)})"
        return f"NoCollapseUpTo({self.i_max})"

    def to_csv(self) -> str:
        lines = ["base,exponent,f_power,product_bound,status"]
        for row in self.rows:
            status = "collapsed" if row.collapsed else "ok"
            lines.append(
                f"{self.base},{row.exponent},{row.f_power},{row.product_bound},{status}"
            )
        if self.truncated:
            lines.append(f"{self.base},,,,truncated")
        return "\n".join(lines) + "\n"


def check_collapse(
    base: int,
    i_max: int,
    limits: Limits = DEFAULT_LIMITS,
    fast: bool = True,
    budget_seconds: Optional[float] = None,
) -> CollapseReport:
    """Evaluate f(base^i) for i = 1..i_max, stopping at the first strict drop
    below i*f(base). The product bound doubles as a certified upper-bound
    hint, which is what makes large collapse checks affordable."""
    if base < 2:
        raise ValueError("base must be at least 2")
    f_base = compute_single(base, limits=limits)
    report = CollapseReport(base=base, f_base=f_base, i_max=i_max)
    deadline = (
        time.monotonic() + budget_seconds if budget_seconds is not None else None
    )
    power = 1
    for i in range(1, i_max + 1):
        power *= base
        if power.bit_length() > MAX_TARGET_BITS:
            report.truncated = True
            break
        if deadline is not None and time.monotonic() > deadline:
            report.truncated = True
            break
        bound = i * f_base
        f_power = compute_single(power, limits=limits, fast=fast, ub_hint=bound)
        if f_power > bound:
            raise RuntimeError(
                f"f({base}^{i}) = {f_power} exceeds the product bound {bound}"
            )
        report.rows.append(CollapseRow(i, f_power, bound))
        if f_power < bound:
            report.collapsed_at = i
            break
    return report


def _members_pow2(limit: int):
    i, v = 1, 2
    while v <= limit:
        yield v, 2 * i
        i += 1
        v *= 2


def _members_pow235(limit: int):
    out = []
    i = 0
    p2 = 1
    while p2 <= limit:
        j = 0
        p23 = p2
        while p23 <= limit:
            k = 0
            v = p23
            while v <= limit and k <= 5:
                if i + j + k > 0:
                    out.append((v, 2 * i + 3 * j + 5 * k))
                k += 1
                v *= 5
            j += 1
            p23 *= 3
        i += 1
        p2 *= 2
    out.sort()
    return out


def _members_pow2plus1(limit: int):
    # known exceptions at i = 3 and i = 9: f(9) = 6 and f(513) = 18 both
    # undercut 2i + 1 (9 = 3*3, 513 = 27*19)
    i, v = 1, 2
    out = []
    while v + 1 <= limit:
        if i not in (3, 9):
            out.append((v + 1, 2 * i + 1))
        i += 1
        v *= 2
    return out


def family_members(family: str, limit: int) -> List[Tuple[int, int]]:
    """(member, conjectured f) pairs, ascending by member value."""
    if family == "pow2":
        return list(_members_pow2(limit))
    if family == "pow235":
        return _members_pow235(limit)
    if family == "pow2plus1":
        return _members_pow2plus1(limit)
    raise ValueError(f"family must be one of {FAMILIES}")


def check_family(
    family: str,
    limit: int,
    limits: Limits = DEFAULT_LIMITS,
    fast: bool = True,
    threads: int = 1,
    budget_seconds: Optional[float] = None,
) -> List[Tuple[int, int, int]]:
    """Returns (member, f, expected) for every member violating its
    conjectured value; an empty list means the family checks out.

    The conjectured value is itself a certified upper bound (the defining
    product/sum construction), so it rides along as the fast-mode hint.
    """
    members = family_members(family, limit)
    deadline = (
        time.monotonic() + budget_seconds if budget_seconds is not None else None
    )

    def evaluate(pair):
        member, expected = pair
        f = compute_single(member, limits=limits, fast=fast, ub_hint=expected)
        return member, f, expected

    results = []
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(evaluate, members))
    else:
        for pair in members:
            if deadline is not None and time.monotonic() > deadline:
                break
            results.append(evaluate(pair))
    results.sort()
    return [(m, f, e) for (m, f, e) in results if f != e]


def family_csv(family: str, limit: int, violations) -> str:
    lines = ["member,value_f,expected,status"]
    for member, f, expected in violations:
        lines.append(f"{member},{f},{expected},violation")
    return "\n".join(lines) + "\n"
