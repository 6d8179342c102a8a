"""
Empirical half-region depth: full grid, finite subsets and increments.

Counting is vectorized per block of rows; blocks are reduced with integer
sums, so results do not depend on the number of worker threads.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config import Settings, get_settings
from ..exceptions import DomainError
from ..gridfn.models import GridFunction, IndexSubset
from ..gridfn.operations import check_same_grid, check_subset
from ..processes.models import PathEnsemble
from ..processes.streams import run_blocks
from .models import DepthEstimate, DifferenceCriterion, MinMinCheck

logger = logging.getLogger(__name__)


def count_sides(paths: np.ndarray, h_values: np.ndarray, chunk: int = 64) -> Tuple[int, int, int]:
    """
    (#rows >= h everywhere, #rows <= h everywhere, #rows equal to h) for one block.

    Columns are scanned ``chunk`` at a time; rows that have already crossed h
    in both directions are dropped, and the scan stops once none remain.
    """
    rows, k = paths.shape
    above = np.ones(rows, dtype=bool)
    below = np.ones(rows, dtype=bool)
    live = np.arange(rows)
    for start in range(0, k, chunk):
        seg = paths[live, start:start + chunk]
        target = h_values[None, start:start + chunk]
        above[live] &= np.all(seg >= target, axis=1)
        below[live] &= np.all(seg <= target, axis=1)
        live = live[above[live] | below[live]]
        if live.size == 0:
            break
    return int(above.sum()), int(below.sum()), int((above & below).sum())


def _count(paths: np.ndarray, h_values: np.ndarray, jobs: int) -> Tuple[int, int, int]:
    n, k = paths.shape
    parts = run_blocks(lambda b, start, stop: count_sides(paths[start:stop], h_values), n, k, jobs)
    return tuple(int(sum(p[i] for p in parts)) for i in range(3))


def _metadata(ens: PathEnsemble) -> dict:
    return {
        "grid_size": ens.grid.size,
        "seed": ens.seed,
        "model": ens.model.descriptor() if ens.model is not None else None,
    }


def empirical_depth(
    ens: PathEnsemble, h: GridFunction, settings: Optional[Settings] = None
) -> DepthEstimate:
    """
    Half-region depth of h with respect to the empirical measure of an ensemble.

    Args:
        ens: Sample paths.
        h: Function on the ensemble grid.
        settings: Supplies the CI z-value and the worker count.

    Returns:
        DepthEstimate with both one-sided counts.

    Raises:
        DomainError: If h lives on another grid.
    """
    settings = settings or get_settings()
    check_same_grid(ens.grid, h.grid)
    above, below, both = _count(ens.paths, h.values, settings.jobs)
    logger.debug("depth counts n=%d grid=%d: above=%d below=%d", ens.n, ens.grid.size, above, below)
    return DepthEstimate.from_counts(above, below, ens.n, settings.z, count_both=both, **_metadata(ens))


def empirical_depth_subset(
    ens: PathEnsemble, h: GridFunction, J: IndexSubset, settings: Optional[Settings] = None
) -> DepthEstimate:
    """Depth of h with the order relations restricted to the grid indices in J."""
    settings = settings or get_settings()
    check_same_grid(ens.grid, h.grid)
    check_subset(J, ens.grid)
    cols = J.array
    above, below, both = _count(ens.paths[:, cols], h.values[cols], settings.jobs)
    return DepthEstimate.from_counts(
        above, below, ens.n, settings.z, count_both=both, subset=list(J.indices), **_metadata(ens)
    )


def check_intervals(intervals: Sequence[Sequence[int]], size: int) -> np.ndarray:
    """
    Validate index pairs (u, v) with u < v and return them sorted by u.

    Intervals may share an endpoint but must not overlap.
    """
    if not intervals:
        raise DomainError("at least one interval is required")
    arr = np.asarray(intervals, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("intervals must be (u, v) index pairs")
    if np.any(arr[:, 0] >= arr[:, 1]):
        raise DomainError("every interval needs u < v")
    if np.any(arr < 0) or np.any(arr >= size):
        raise DomainError(f"interval endpoints must lie in 0..{size - 1}")
    arr = arr[np.argsort(arr[:, 0], kind="stable")]
    if np.any(arr[1:, 0] < arr[:-1, 1]):
        raise DomainError("intervals overlap")
    return arr


def empirical_increment_depth(
    ens: PathEnsemble,
    h: GridFunction,
    intervals: Sequence[Sequence[int]],
    settings: Optional[Settings] = None,
) -> DepthEstimate:
    """Depth over the increments X(v) - X(u) against h(v) - h(u) on disjoint intervals."""
    settings = settings or get_settings()
    check_same_grid(ens.grid, h.grid)
    arr = check_intervals(intervals, ens.grid.size)
    u, v = arr[:, 0], arr[:, 1]
    incr = ens.paths[:, v] - ens.paths[:, u]
    target = h.values[v] - h.values[u]
    above, below, both = _count(incr, target, settings.jobs)
    return DepthEstimate.from_counts(
        above, below, ens.n, settings.z, count_both=both, intervals=arr.tolist(), **_metadata(ens)
    )


def path_extremes(paths: np.ndarray, cols: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row minimum and maximum over the selected columns."""
    sub = paths if cols is None else paths[:, cols]
    return sub.min(axis=1), sub.max(axis=1)


def constant_counts(minima: np.ndarray, maxima: np.ndarray, cs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-sided counts for many constant functions at once.

    A path lies above the constant c exactly when its minimum is >= c and
    below it exactly when its maximum is <= c.
    """
    lo = np.sort(minima)
    hi = np.sort(maxima)
    cs = np.asarray(cs, dtype=float)
    above = lo.size - np.searchsorted(lo, cs, side="left")
    below = np.searchsorted(hi, cs, side="right")
    return above.astype(np.int64), below.astype(np.int64)


def constant_depths(ens: PathEnsemble, cs: Sequence[float], J: Optional[IndexSubset] = None) -> np.ndarray:
    """Empirical depth of every constant in cs, optionally over a subset J."""
    cols = None
    if J is not None:
        check_subset(J, ens.grid)
        cols = J.array
    minima, maxima = path_extremes(ens.paths, cols)
    above, below = constant_counts(minima, maxima, np.asarray(cs, dtype=float))
    return np.minimum(above, below) / ens.n


def difference_criterion(ens: PathEnsemble, S: IndexSubset) -> DifferenceCriterion:
    """
    Estimate P(X - Y ⪯_S 0) by pairing the first half of the ensemble with the second.

    Args:
        ens: At least two paths.
        S: Grid indices over which the difference must be non-positive.

    Returns:
        DifferenceCriterion with the pair frequency and its standard error.
    """
    check_subset(S, ens.grid)
    pairs = ens.n // 2
    if pairs < 1:
        raise DomainError("difference criterion needs at least two paths")
    cols = S.array
    diff = ens.paths[:pairs, cols] - ens.paths[pairs : 2 * pairs, cols]
    p = float(np.mean(np.all(diff <= 0.0, axis=1)))
    return DifferenceCriterion(
        probability=p,
        pairs=pairs,
        standard_error=math.sqrt(p * (1.0 - p) / pairs),
        subset=list(S.indices),
    )


def min_min_check(F_n: float, G_n: float, F: float, G: float) -> MinMinCheck:
    """|min(F_n, G_n) - min(F, G)| <= |F_n - F| + |G_n - G| for reals."""
    return MinMinCheck(lhs=abs(min(F_n, G_n) - min(F, G)), rhs=abs(F_n - F) + abs(G_n - G))