"""Integer complexity f(n): the fewest 1's that build n with + and *.

Engines: a near-linear all-targets table (divide-and-conquer online
(min,+)-convolution) and a sublinear single-target evaluator (prefix plus
window recursion over the right endpoints n // d), with witness expressions,
conjecture checkers and a sampling estimator on top.
"""

from .bounds import DEFAULT_LIMITS, INFINITY, Limits, addendum_limit, lower_bound, upper_bound
from .all_targets import ComplexityTable, compute_table, naive_oracle, read_table, write_table
from .single_target import SingleTargetRun, WindowPlan, compute_single, window_lookup
from .witness import ExpressionTree, reconstruct, render, verify
from .conjectures import CollapseReport, check_collapse, check_family
from .sampling import SampleStats, estimate_avg, exact_avg, emit_table

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LIMITS", "INFINITY", "Limits", "addendum_limit", "lower_bound",
    "upper_bound", "ComplexityTable", "compute_table", "naive_oracle",
    "read_table", "write_table", "SingleTargetRun", "WindowPlan",
    "compute_single", "window_lookup", "ExpressionTree", "reconstruct",
    "render", "verify", "CollapseReport", "check_collapse", "check_family",
    "SampleStats", "estimate_avg", "exact_avg", "emit_table",
]
