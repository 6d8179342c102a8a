"""
Finite-grid functions: order relations, norms, margins, eps-nets and
entropy integrals.

Quick Start:
    >>> from hrdepth.gridfn import Grid, GridFunction, compare
    >>> grid = Grid.uniform(2)
    >>> x = GridFunction(grid=grid, values=[1, 2, 3])
    >>> compare(x, GridFunction.constant(grid, 0.0))
    (True, False)
"""

from .io import read_grid_function, write_grid_function
from .models import (
    EntropyEstimate,
    EpsilonNet,
    FamilyKind,
    FamilySpec,
    Grid,
    GridFunction,
    IndexSubset,
)
from .nets import (
    entropy_integral,
    halving_ratio,
    epsilon_net,
    log_covering_number,
    nearest_center_distance,
    sample_family,
)
from .operations import (
    check_same_grid,
    check_subset,
    compare,
    lower_margin,
    sup_norm,
    upper_margin,
)

__all__ = [
    "Grid",
    "GridFunction",
    "FamilyKind",
    "FamilySpec",
    "IndexSubset",
    "EpsilonNet",
    "EntropyEstimate",
    "compare",
    "sup_norm",
    "lower_margin",
    "upper_margin",
    "check_same_grid",
    "check_subset",
    "epsilon_net",
    "log_covering_number",
    "entropy_integral",
    "halving_ratio",
    "sample_family",
    "nearest_center_distance",
    "read_grid_function",
    "write_grid_function",
]
