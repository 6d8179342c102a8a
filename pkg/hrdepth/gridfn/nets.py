"""
Epsilon-nets, covering counts and the entropy integral for function families.

Nets for Lipschitz-type families quantize values to the lattice eps·Z. A
rounded family member changes by at most ``L·Δ/eps + 1`` lattice steps
between neighbouring grid points, so the lattice vectors obeying that
adjacency rule form a cover; the explicit net additionally drops centers
whose eps-ball misses the family.
"""

import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy import integrate

from ..config import Settings, get_settings
from ..exceptions import DomainError, ResourceCapError
from .models import EntropyEstimate, EpsilonNet, FamilyKind, FamilySpec, Grid, GridFunction

logger = logging.getLogger(__name__)

# DP work (grid points x lattice values) above which the closed-form bound is used
_DP_BUDGET = 2e8


def _lattice_half_width(radius: float, eps: float) -> int:
    return int(math.floor(radius / eps + 0.5))


def _adjacency_steps(grid: Grid, lipschitz: float, eps: float) -> np.ndarray:
    spacing = np.diff(grid.axes[0])
    return np.floor(lipschitz * spacing / eps + 1.0 + 1e-12).astype(np.int64)


def _constant_centers(radius: float, eps: float) -> np.ndarray:
    k = max(1, math.ceil(radius / eps - 1e-12))
    return (2 * np.arange(k) - (k - 1)) * eps


def _greedy_cover(functions: List[GridFunction], eps: float) -> List[GridFunction]:
    """Pick centers among the listed functions until every function is within eps."""
    remaining = np.vstack([f.values for f in functions])
    owners = list(functions)
    centers: List[GridFunction] = []
    while remaining.shape[0]:
        centers.append(owners[0])
        far = np.max(np.abs(remaining - remaining[0]), axis=1) > eps
        remaining = remaining[far]
        owners = [f for f, keep in zip(owners, far) if keep]
    return centers


def _lattice_centers(family: FamilySpec, eps: float, max_centers: int) -> np.ndarray:
    """Enumerate the pruned lattice cover of a Lipschitz or smooth ball, layer by layer."""
    grid = family.grid
    t = grid.axes[0]
    spacing = np.diff(t)
    R, L = family.radius, family.lipschitz
    J = _lattice_half_width(R, eps)
    steps = _adjacency_steps(grid, L, eps)
    smooth = family.kind is FamilyKind.SMOOTH_BALL

    levels = np.arange(-J, J + 1, dtype=np.int64)
    keep = np.abs(levels) * eps - eps <= R
    rows = levels[keep][:, None]
    lo = np.maximum(rows[:, 0] * eps - eps, -R)
    hi = np.minimum(rows[:, 0] * eps + eps, R)

    for i, w in enumerate(steps):
        offsets = np.arange(-w, w + 1, dtype=np.int64)
        nxt = (rows[:, -1][:, None] + offsets[None, :]).ravel()
        parent = np.repeat(np.arange(rows.shape[0]), offsets.size)
        ok = np.abs(nxt) <= J
        if smooth and i >= 1:
            d_prev, d_cur = spacing[i - 1], spacing[i]
            slope_prev = (rows[parent, -1] - rows[parent, -2]) * eps / d_prev
            slope_cur = (nxt - rows[parent, -1]) * eps / d_cur
            slack = family.derivative_lipschitz * (d_prev + d_cur) + eps / d_prev + eps / d_cur
            ok &= np.abs(slope_cur - slope_prev) <= slack + 1e-12
        # interval propagation: reachable values of a member inside the eps-ball so far
        reach_lo = np.maximum(np.maximum(nxt * eps - eps, -R), lo[parent] - L * spacing[i])
        reach_hi = np.minimum(np.minimum(nxt * eps + eps, R), hi[parent] + L * spacing[i])
        ok &= reach_lo <= reach_hi + 1e-12
        parent, nxt = parent[ok], nxt[ok]
        rows = np.column_stack([rows[parent], nxt])
        lo, hi = reach_lo[ok], reach_hi[ok]
        if rows.shape[0] > max_centers:
            raise ResourceCapError(
                f"epsilon-net enumeration exceeds {max_centers} centers at grid point {i + 1} "
                f"of {grid.size}; use log_covering_number for counts"
            )
    return rows * eps


def epsilon_net(family: FamilySpec, eps: float, settings: Optional[Settings] = None) -> EpsilonNet:
    """
    Build an explicit sup-norm eps-net of a family.

    Args:
        family: The family to cover.
        eps: Covering radius.
        settings: Runtime settings (enumeration cap).

    Returns:
        EpsilonNet with every family member within eps of some center.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    settings = settings or get_settings()
    grid = family.grid
    if family.kind is FamilyKind.CONSTANTS:
        centers = [GridFunction.constant(grid, c) for c in _constant_centers(family.radius, eps)]
    elif family.kind is FamilyKind.FINITE_LIST:
        centers = _greedy_cover(family.functions, eps)
    elif family.kind in (FamilyKind.LIPSCHITZ_BALL, FamilyKind.SMOOTH_BALL):
        matrix = _lattice_centers(family, eps, settings.net_max_centers)
        centers = [GridFunction(grid=grid, values=row) for row in matrix]
    else:
        raise DomainError(f"unsupported family kind: {family.kind}")
    logger.debug("eps-net of %s at eps=%g has %d centers", family.kind.value, eps, len(centers))
    return EpsilonNet(centers=centers, eps=eps)


def _refined_family(family: FamilySpec, eps: float) -> FamilySpec:
    """Uniform grid fine enough that L·Δ <= eps/2, so grid covers track the continuum class."""
    t = family.grid.axes[0]
    span = float(t[-1] - t[0])
    if family.lipschitz <= 0 or span <= 0:
        return family
    intervals = max(family.grid.size - 1, math.ceil(2.0 * family.lipschitz * span / eps))
    return family.with_grid(Grid(axes=(t[0] + span * np.arange(intervals + 1) / intervals,)))


def log_covering_number(family: FamilySpec, eps: float, refine: bool = False) -> float:
    """
    Logarithm of the size of the lattice cover of a family.

    For Lipschitz-type families the count is the number of lattice vectors
    obeying the adjacency rule, computed exactly by a normalized transfer
    recursion; when that exceeds the work budget the product bound
    ``log M + sum log(2 w_i + 1)`` is returned instead.

    Args:
        family: The family to cover.
        eps: Covering radius.
        refine: Count on a refined uniform grid (Lipschitz-type families only).

    Returns:
        log N(eps).
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if family.kind is FamilyKind.CONSTANTS:
        return math.log(_constant_centers(family.radius, eps).size)
    if family.kind is FamilyKind.FINITE_LIST:
        return math.log(len(_greedy_cover(family.functions, eps)))
    if family.kind not in (FamilyKind.LIPSCHITZ_BALL, FamilyKind.SMOOTH_BALL):
        raise DomainError(f"unsupported family kind: {family.kind}")

    if refine:
        family = _refined_family(family, eps)
    J = _lattice_half_width(family.radius, eps)
    levels = np.arange(-J, J + 1)
    admissible = np.abs(levels) * eps - eps <= family.radius
    M = int(admissible.sum())
    steps = np.minimum(_adjacency_steps(family.grid, family.lipschitz, eps), M - 1)

    if family.grid.size * M > _DP_BUDGET:
        logger.warning(
            "covering count at eps=%g needs %d x %d transfer steps; using the product bound",
            eps, family.grid.size, M,
        )
        return math.log(M) + float(np.sum(np.log(2 * steps + 1)))

    counts = np.ones(M)
    log_scale = 0.0
    for w in steps:
        cs = np.concatenate(([0.0], np.cumsum(counts)))
        j = np.arange(M)
        counts = cs[np.minimum(j + w + 1, M)] - cs[np.maximum(j - w, 0)]
        total = counts.sum()
        counts /= total
        log_scale += math.log(total)
    return log_scale + math.log(counts.sum())


def _integrate_log_grid(log_n, a: float, b: float, points_per_octave: int) -> float:
    octaves = max(math.log2(b / a), 1e-12)
    n = max(9, int(math.ceil(octaves * points_per_octave)) + 1)
    if n % 2 == 0:
        n += 1
    u = np.linspace(math.log(a), math.log(b), n)
    eps = np.exp(u)
    integrand = np.array([math.sqrt(max(log_n(e), 0.0)) for e in eps]) / np.sqrt(eps) * eps
    return float(integrate.simpson(integrand, x=u))


def halving_ratio(log_n: Callable[[float], float], eps_min: float, points_per_octave: int = 4) -> float:
    """
    Entropy-integral mass gained by halving eps_min, relative to the octave above it.

    For log N(eps) ~ eps^-p the ratio is 2^((p - 1) / 2): below one for
    p < 1, one for the borderline eps^-1 integrand, above one beyond it.
    Returns 0 when the upper octave carries no mass.
    """
    below = _integrate_log_grid(log_n, eps_min / 2.0, eps_min, points_per_octave)
    above = _integrate_log_grid(log_n, eps_min, 2.0 * eps_min, points_per_octave)
    return below / above if above > 0 else 0.0


def entropy_integral(
    family: FamilySpec,
    eps_min: float,
    eps_max: float,
    points_per_octave: int = 4,
    refine: bool = True,
    settings: Optional[Settings] = None,
) -> EntropyEstimate:
    """
    Quadrature of sqrt(log N(eps)) / sqrt(eps) over [eps_min, eps_max].

    The divergence flag compares the contributions of [eps_min/2, eps_min]
    and [eps_min, 2 eps_min]; an integrable integrand shrinks that ratio
    below one, while an eps^-1 integrand keeps it near one.

    Args:
        family: The family.
        eps_min: Lower integration limit.
        eps_max: Upper integration limit.
        points_per_octave: Quadrature resolution in log(eps).
        refine: Count Lipschitz-type families on eps-adapted grids.
        settings: Runtime settings (divergence threshold).

    Returns:
        EntropyEstimate.
    """
    if not (0 < eps_min < eps_max):
        raise DomainError(f"need 0 < eps_min < eps_max, got [{eps_min}, {eps_max}]")
    settings = settings or get_settings()
    cache: Dict[float, float] = {}

    def log_n(e: float) -> float:
        if e not in cache:
            cache[e] = log_covering_number(family, e, refine=refine)
        return cache[e]

    value = _integrate_log_grid(log_n, eps_min, eps_max, points_per_octave)
    ratio = halving_ratio(log_n, eps_min, points_per_octave)
    logger.info("entropy integral %s on [%g, %g] = %g (halving ratio %.3f)",
                family.kind.value, eps_min, eps_max, value, ratio)
    return EntropyEstimate(
        value=value,
        divergence_flag=bool(ratio >= settings.divergence_ratio),
        growth_ratio=ratio,
        eps_min=eps_min,
        eps_max=eps_max,
    )


def sample_family(family: FamilySpec, size: int, seed: int) -> List[GridFunction]:
    """
    Draw random members of a family.

    Lipschitz members are clipped random walks; smooth members integrate a
    clipped slope walk and are rescaled into the sup-norm ball.
    """
    rng = np.random.default_rng(seed)
    grid = family.grid
    R = family.radius
    if family.kind is FamilyKind.CONSTANTS:
        return [GridFunction.constant(grid, c) for c in rng.uniform(-R, R, size)]
    if family.kind is FamilyKind.FINITE_LIST:
        picks = rng.integers(0, len(family.functions), size)
        return [family.functions[i] for i in picks]
    if family.kind not in (FamilyKind.LIPSCHITZ_BALL, FamilyKind.SMOOTH_BALL):
        raise DomainError(f"unsupported family kind: {family.kind}")

    spacing = np.diff(grid.axes[0])
    members = []
    for _ in range(size):
        if family.kind is FamilyKind.LIPSCHITZ_BALL:
            values = np.empty(grid.size)
            values[0] = rng.uniform(-R, R)
            steps = rng.uniform(-1.0, 1.0, spacing.size) * family.lipschitz * spacing
            for i, step in enumerate(steps):
                values[i + 1] = np.clip(values[i] + step, -R, R)
        else:
            slopes = np.empty(spacing.size)
            if spacing.size:
                slopes[0] = rng.uniform(-family.lipschitz, family.lipschitz)
                kicks = rng.uniform(-1.0, 1.0, spacing.size) * family.derivative_lipschitz * spacing
                for i in range(1, spacing.size):
                    slopes[i] = np.clip(slopes[i - 1] + kicks[i], -family.lipschitz, family.lipschitz)
            values = rng.uniform(-R, R) + np.concatenate(([0.0], np.cumsum(slopes * spacing)))
            peak = np.max(np.abs(values))
            if peak > R:
                values = values * (R / peak)
        members.append(GridFunction(grid=grid, values=values))
    return members


def nearest_center_distance(member: GridFunction, net: EpsilonNet) -> float:
    """Sup-norm distance from a function to the closest center of a net."""
    return float(np.min(np.max(np.abs(net.matrix - member.values[None, :]), axis=1)))
