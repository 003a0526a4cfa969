"""Command-line surface. Results go to stdout, timing/diagnostics to stderr,
so piped output is reproducible byte-for-byte for fixed flags and seed.

Exit codes: 0 success, 1 usage/IO error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import conjectures, sampling, witness
from .all_targets import compute_table, naive_oracle, write_table
from .bounds import Limits
from .single_target import compute_single


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="intcomplexity",
        description="Integer complexity engines: tables, single targets, "
        "witnesses, conjecture checks and sampling.",
    )
    p.add_argument("--alpha", type=float, default=4.125,
                   help="upper-bound constant (default 4.125)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--threads", type=int, default=1,
                   help="worker count for verify/sample")
    p.add_argument("--debug-asserts", action="store_true",
                   help="enable internal containment assertions")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("table", help="compute f(1..N) and write an ICT1 file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--engine", choices=("brute", "capped", "packed"),
                    default="capped")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("eval", help="compute a single f(N)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=("per-window", "global-L"),
                    default="per-window")
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--fast", action="store_true")
    sp.add_argument("--ub-hint", type=int, default=None,
                    help="certified upper bound used for fast-mode pruning")

    sp = sub.add_parser("oracle", help="naive quadratic DP (test/debug)")
    sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("collapse", help="power-collapse search for one base")
    sp.add_argument("--base", type=int, required=True)
    sp.add_argument("--max-exp", type=int, required=True)
    sp.add_argument("--budget", type=float, default=None,
                    help="abort cleanly after SECONDS")

    sp = sub.add_parser("verify", help="check a conjectured family")
    sp.add_argument("--family", choices=conjectures.FAMILIES, required=True)
    sp.add_argument("--limit", type=int, required=True)

    sp = sub.add_parser("sample", help="estimate the average log-complexity")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--out", required=True)
    sp.add_argument("--plot", default=None,
                    help="also render the sampled means to this image file")

    sp = sub.add_parser("check-witness", help="parse and verify an expression")
    sp.add_argument("--file", required=True)
    sp.add_argument("--expect-value", type=int, required=True)
    sp.add_argument("--expect-ones", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    limits = Limits(alpha=args.alpha)
    t0 = time.monotonic()
    try:
        code = _dispatch(args, limits)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"elapsed: {time.monotonic() - t0:.3f}s", file=sys.stderr)
    return code


def _dispatch(args, limits: Limits) -> int:
    if args.command == "table":
        table = compute_table(args.n, limits, engine=args.engine)
        write_table(table, args.out)
        print(f"wrote f(1..{args.n}) [{args.engine}] to {args.out}")
        return 0

    if args.command == "eval":
        mode = "global_L" if args.mode == "global-L" else "per_window_L"
        if args.witness:
            run = compute_single(args.n, limits, mode=mode, fast=args.fast,
                                 ub_hint=args.ub_hint, keep_run=True,
                                 debug_asserts=args.debug_asserts)
            print(f"f({args.n}) = {run.value}")
            tree = witness.reconstruct(args.n, run)
            assert tree.value == args.n and tree.ones == run.value
            print(witness.render(tree))
        else:
            value = compute_single(args.n, limits, mode=mode, fast=args.fast,
                                   ub_hint=args.ub_hint,
                                   debug_asserts=args.debug_asserts)
            print(f"f({args.n}) = {value}")
        return 0

    if args.command == "oracle":
        table = naive_oracle(args.n, limits)
        print(f"f({args.n}) = {table[args.n]}")
        return 0

    if args.command == "collapse":
        report = conjectures.check_collapse(
            args.base, args.max_exp, limits, budget_seconds=args.budget
        )
        sys.stdout.write(report.to_csv())
        print(f"status: {report.status}", file=sys.stderr)
        return 0

    if args.command == "verify":
        violations = conjectures.check_family(
            args.family, args.limit, limits, threads=args.threads
        )
        sys.stdout.write(conjectures.family_csv(args.family, args.limit, violations))
        return 2 if violations else 0

    if args.command == "sample":
        m = None if (args.exact or args.samples is None) else args.samples
        stats = sampling.emit_table([(args.n, m)], args.seed, args.out, limits)
        print(f"wrote {len(stats)} row(s) to {args.out}")
        if args.plot:
            _plot_samples(stats, args.plot)
            print(f"wrote figure to {args.plot}")
        return 0

    if args.command == "check-witness":
        with open(args.file) as fh:
            text = fh.read()
        try:
            value, ones = witness.verify(text)
        except witness.ParseError as e:
            print(f"parse error: {e}", file=sys.stderr)
            return 2
        if value == args.expect_value and ones == args.expect_ones:
            print(f"ok: value={value} ones={ones}")
            return 0
        print(
            f"mismatch: got value={value} ones={ones}, "
            f"expected value={args.expect_value} ones={args.expect_ones}",
            file=sys.stderr,
        )
        return 2

    raise ValueError(f"unknown command {args.command}")


def _plot_samples(stats, path: str) -> None:
    import math

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [math.log10(s.n) for s in stats]
    ys = [s.mean for s in stats]
    errs = [s.ci_halfwidth() for s in stats]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.errorbar(xs, ys, yerr=errs, fmt="o-", capsize=3)
    ax.set_xlabel("log10 n")
    ax.set_ylabel("mean f(i)/log3(i), i <= n")
    ax.set_title("average logarithmic integer complexity")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


if __name__ == "__main__":
    sys.exit(main())
