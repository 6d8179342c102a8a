"""
Half-region depth: empirical estimates, exact product-measure depth,
zero-depth verdicts and population oracles.

Quick Start:
    >>> from hrdepth.depth import exact_product_depth, sparre_andersen_exact
    >>> from hrdepth.processes import MarginalSpec
    >>> round(sparre_andersen_exact(10), 6)
    0.176197
    >>> round(exact_product_depth([MarginalSpec.gaussian()] * 10, [0.0] * 10), 12)
    0.0009765625
"""

from .empirical import (
    check_intervals,
    constant_counts,
    constant_depths,
    count_sides,
    difference_criterion,
    empirical_depth,
    empirical_depth_subset,
    empirical_increment_depth,
    min_min_check,
    path_extremes,
)
from .exact import exact_product_depth, log_sides, nasc_verdict, sparre_andersen_exact
from .models import (
    DepthEstimate,
    DifferenceCriterion,
    MinMinCheck,
    TailKind,
    TailModel,
    VerdictKind,
    ZeroDepthVerdict,
)
from .oracle import OracleCache, cache_key, constant_depth_oracle, population_depth_oracle

__all__ = [
    "DepthEstimate",
    "DifferenceCriterion",
    "MinMinCheck",
    "TailKind",
    "TailModel",
    "VerdictKind",
    "ZeroDepthVerdict",
    "empirical_depth",
    "empirical_depth_subset",
    "empirical_increment_depth",
    "difference_criterion",
    "min_min_check",
    "check_intervals",
    "count_sides",
    "constant_counts",
    "constant_depths",
    "path_extremes",
    "exact_product_depth",
    "nasc_verdict",
    "sparre_andersen_exact",
    "log_sides",
    "population_depth_oracle",
    "constant_depth_oracle",
    "OracleCache",
    "cache_key",
]
