"""Average logarithmic complexity: exact means over a full table for small n,
seeded uniform sampling through the single-target engine for large n."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import IO, Iterable, List, Optional, Tuple, Union

import numpy as np

from .bounds import DEFAULT_LIMITS, LOG3, Limits
from .single_target import compute_single, get_prefix

EXACT_CAP = 100_000_000
DEFAULT_CI_LEVEL = 0.99999
# full-table shortcut bound: samples below it read a shared prefix table
TABLE_SAMPLING_CAP = 50_000_000


@dataclass(frozen=True)
class SampleStats:
    n: int
    m: int
    mean: float
    variance: float
    seed: int
    mode: str  # "exact" | "sampled"

    def ci_halfwidth(self, level: float = DEFAULT_CI_LEVEL) -> float:
        if self.mode == "exact" or self.m < 2:
            return 0.0
        z = NormalDist().inv_cdf(0.5 + level / 2.0)
        return z * math.sqrt(self.variance / self.m)


def _flog_mean_var(values: np.ndarray, ns: np.ndarray) -> Tuple[float, float]:
    flog = values.astype(np.float64) / (np.log(ns.astype(np.float64)) / LOG3)
    mean = float(flog.mean())
    var = float(flog.var(ddof=1)) if flog.size > 1 else 0.0
    return mean, var


def exact_avg(n: int, limits: Limits = DEFAULT_LIMITS) -> SampleStats:
    """Exact mean of f(i)/log3(i) over i = 2..n (needs the full table)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > EXACT_CAP:
        raise ValueError(f"exact_avg capped at {EXACT_CAP}")
    table = get_prefix(n, limits)
    ns = np.arange(2, n + 1, dtype=np.int64)
    mean, var = _flog_mean_var(table[2 : n + 1], ns)
    return SampleStats(n=n, m=n - 1, mean=mean, variance=var, seed=0, mode="exact")


def _draw_uniform(n: int, m: int, seed: int) -> Union[np.ndarray, List[int]]:
    """m iid uniform draws from {2..n}; counter-based generator, so the
    stream is a pure function of (n, m, seed)."""
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    if n <= 2**63 - 2:
        return gen.integers(2, n, size=m, dtype=np.int64, endpoint=True)
    span = n - 1  # {2..n}
    out: List[int] = []
    limit = (1 << 128) - ((1 << 128) % span)
    while len(out) < m:
        words = gen.integers(0, 1 << 64, size=2 * (m - len(out)), dtype=np.uint64)
        for i in range(0, words.size, 2):
            x = (int(words[i]) << 64) | int(words[i + 1])
            if x < limit:
                out.append(2 + x % span)
                if len(out) == m:
                    break
    return out


def estimate_avg(
    n: int,
    m: int,
    seed: int,
    limits: Limits = DEFAULT_LIMITS,
    fast: bool = True,
) -> SampleStats:
    """Sampled mean of f_log over {2..n}: m draws, deterministic in
    (n, m, seed)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    if m < 2:
        raise ValueError("need at least 2 samples")
    draws = _draw_uniform(n, m, seed)
    if n <= TABLE_SAMPLING_CAP:
        table = get_prefix(n, limits)
        arr = np.asarray(draws, dtype=np.int64)
        values = table[arr]
        mean, var = _flog_mean_var(values, arr)
    else:
        flogs = np.empty(m, dtype=np.float64)
        for i, x in enumerate(draws):
            x = int(x)
            flogs[i] = compute_single(x, limits=limits, fast=fast) / (math.log(x) / LOG3)
        mean = float(flogs.mean())
        var = float(flogs.var(ddof=1))
    return SampleStats(n=n, m=m, mean=mean, variance=var, seed=seed, mode="sampled")


def emit_table(
    rows: Iterable[Tuple[int, Optional[int]]],
    seed: int,
    out: Union[str, IO[str]],
    limits: Limits = DEFAULT_LIMITS,
    fast: bool = True,
    ci_level: float = DEFAULT_CI_LEVEL,
) -> List[SampleStats]:
    """One CSV row per requested (n, samples) pair; samples=None means exact.
    Columns: n,mean,ci_halfwidth,samples,mode,seed. Reals carry 6 decimals."""
    stats: List[SampleStats] = []
    for n, m in rows:
        if m is None:
            stats.append(exact_avg(n, limits))
        else:
            stats.append(estimate_avg(n, m, seed, limits, fast=fast))
    lines = ["n,mean,ci_halfwidth,samples,mode,seed"]
    for s in stats:
        lines.append(
            f"{s.n},{s.mean:.6f},{s.ci_halfwidth(ci_level):.6f},{s.m},{s.mode},{s.seed}"
        )
    text = "\n".join(lines) + "\n"
    if isinstance(out, str):
        with open(out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return stats
