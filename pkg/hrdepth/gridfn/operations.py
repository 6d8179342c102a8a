"""
Pointwise order, norms and margins for grid functions.

All inequalities are non-strict: ``x ⪰ h`` means ``x(t) >= h(t)`` at every
grid point considered.
"""

from typing import Optional, Tuple

import numpy as np

from ..exceptions import DomainError
from .models import Grid, GridFunction, IndexSubset


def check_same_grid(a: Grid, b: Grid) -> None:
    if not a.same_as(b):
        raise DomainError(f"grid mismatch: {a.shape} points vs {b.shape} points")


def check_subset(J: IndexSubset, grid: Grid) -> None:
    if not J.fits(grid):
        raise DomainError(f"index {J.indices[-1]} is outside a grid of {grid.size} points")


def compare(
    x: GridFunction, h: GridFunction, J: Optional[IndexSubset] = None
) -> Tuple[bool, bool]:
    """
    Decide ``x ⪰ h`` and ``x ⪯ h`` on the index subset J.

    Args:
        x: The function being ranked.
        h: The reference function.
        J: Grid positions to compare on; the whole grid when omitted.

    Returns:
        (above, below).
    """
    check_same_grid(x.grid, h.grid)
    diff = x.values - h.values
    if J is not None:
        check_subset(J, x.grid)
        diff = diff[J.array]
    return bool(np.all(diff >= 0)), bool(np.all(diff <= 0))


def sup_norm(x: GridFunction) -> float:
    return float(np.max(np.abs(x.values)))


def lower_margin(x: GridFunction, h: GridFunction) -> float:
    """min over the grid of x(t) - h(t); non-negative exactly when x ⪰ h."""
    check_same_grid(x.grid, h.grid)
    return float(np.min(x.values - h.values))


def upper_margin(x: GridFunction, h: GridFunction) -> float:
    """max over the grid of x(t) - h(t); non-positive exactly when x ⪯ h."""
    check_same_grid(x.grid, h.grid)
    return float(np.max(x.values - h.values))
