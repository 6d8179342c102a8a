"""
The smoothing transform X = Y + Z and the analytic shift bounds that make
smoothed depth well behaved.
"""

import logging
import math
import warnings
from typing import Optional

import numpy as np
from scipy import integrate

from ..exceptions import DomainError, NumericError
from ..gridfn.models import GridFunction
from ..gridfn.operations import check_same_grid, sup_norm
from ..processes.models import PathEnsemble
from ..processes.simulator import smoothing_offsets
from .models import (
    BracketWidthCheck,
    MarginShiftCheck,
    PositivityFloor,
    SmoothingDensity,
    TVShiftCheck,
)

logger = logging.getLogger(__name__)

_QUAD_EPSABS = 1e-9
_QUAD_LIMIT = 200


def smooth_ensemble(ens: PathEnsemble, density: SmoothingDensity, seed: int) -> PathEnsemble:
    """
    Add one independent Z_j to every value of path j.

    Offsets come from the smoothing stream of ``seed``, so smoothing a
    simulated ensemble with its own seed reproduces ``simulate`` on the
    smoothed model.

    Raises:
        DomainError: If the ensemble is already smoothed.
    """
    if ens.smoothed:
        raise DomainError("ensemble is already smoothed")
    z = smoothing_offsets(density, ens.n, ens.grid.size, seed)
    return PathEnsemble(
        grid=ens.grid,
        paths=ens.paths + z[:, None],
        model=ens.model.smoothed(density) if ens.model is not None else None,
        seed=ens.seed,
        smoothed=True,
        smoothing=density,
    )


def grad_l1(density: SmoothingDensity) -> float:
    """Closed-form ∫|f'|."""
    return density.grad_l1


def _quad(fn, breakpoints, what: str) -> tuple:
    """Integrate ``fn`` over R, splitting at the given points; warnings become NumericError."""
    points = sorted(set(float(p) for p in breakpoints))
    edges = [-np.inf] + points + [np.inf]
    total, error = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == hi:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                value, err = integrate.quad(fn, lo, hi, epsabs=_QUAD_EPSABS, limit=_QUAD_LIMIT)
            except integrate.IntegrationWarning as e:
                raise NumericError(
                    f"quadrature of {what} did not converge",
                    {"interval": (lo, hi), "reason": str(e).splitlines()[0]},
                ) from e
        total += value
        error += err
    return total, error


def grad_l1_quadrature(density: SmoothingDensity) -> float:
    """∫|f'| by numerical quadrature."""
    value, _ = _quad(lambda x: abs(float(density.derivative(x))), [0.0], "|f'|")
    return value


def density_mass(density: SmoothingDensity) -> float:
    value, _ = _quad(lambda x: float(density.pdf(x)), [0.0], "f")
    return value


def tv_shift_check(density: SmoothingDensity, delta: float) -> TVShiftCheck:
    """
    Compare ∫|f(x+delta) - f(x)| dx with |delta|·∫|f'|.

    Args:
        density: Smoothing density.
        delta: Shift.

    Returns:
        TVShiftCheck with lhs, rhs and the doubled bound used for margin shifts.

    Raises:
        NumericError: If the adaptive quadrature does not converge.
    """
    g = density.grad_l1
    if delta == 0:
        return TVShiftCheck(delta=0.0, lhs=0.0, rhs=0.0, w3_bound=0.0)
    # the two densities cross at -delta/2; the Laplace kinks sit at -delta and 0
    lhs, err = _quad(
        lambda x: abs(float(density.pdf(x + delta)) - float(density.pdf(x))),
        [-delta, -delta / 2.0, 0.0],
        "the shift difference",
    )
    logger.debug("tv shift %s delta=%g: lhs=%.9g (err %.2g)", density.family.value, delta, lhs, err)
    return TVShiftCheck(
        delta=delta,
        lhs=lhs,
        rhs=abs(delta) * g,
        w3_bound=2.0 * abs(delta) * g,
        abs_error=err,
    )


def lower_margins(ens: PathEnsemble, h: GridFunction) -> np.ndarray:
    """W_h = min_t (X(t) - h(t)) for every path; X ⪰ h exactly when W_h >= 0."""
    check_same_grid(ens.grid, h.grid)
    return np.min(ens.paths - h.values[None, :], axis=1)


def margin_shift_check(
    ens: PathEnsemble,
    density: SmoothingDensity,
    h1: GridFunction,
    h2: GridFunction,
    x: float,
    z: Optional[float] = None,
) -> MarginShiftCheck:
    """
    Empirical margin-shift bound for a smoothed ensemble.

    Args:
        ens: Smoothed ensemble.
        density: Its smoothing density.
        h1, h2: Functions on the ensemble grid.
        x: Margin threshold.
        z: Standard errors allowed above the bound (default 3).

    Returns:
        MarginShiftCheck; ``passed`` when the difference is within bound + z·se.
    """
    z = 3.0 if z is None else z
    n = ens.n
    p1 = float(np.mean(lower_margins(ens, h1) >= x))
    p2 = float(np.mean(lower_margins(ens, h2) >= x))
    diff = abs(p1 - p2)
    bound = 2.0 * sup_norm(h1 - h2) * density.grad_l1
    se = math.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / n)
    return MarginShiftCheck(
        x=x, p1=p1, p2=p2, difference=diff, bound=bound, standard_error=se, passed=diff <= bound + z * se
    )


def bracket_width_check(
    ens: PathEnsemble, density: SmoothingDensity, h: GridFunction, delta: float, z: float = 3.0
) -> BracketWidthCheck:
    """Width of the bracket [h - delta, h + delta] in probability, against 4·delta·∫|f'|."""
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    w = lower_margins(ens, h)
    width = float(np.mean((w >= -delta) & (w < delta)))
    bound = 4.0 * delta * density.grad_l1
    se = math.sqrt(width * (1 - width) / ens.n)
    return BracketWidthCheck(
        delta=delta, width=width, bound=bound, standard_error=se, passed=width <= bound + z * se
    )


def positivity_floor(base: PathEnsemble, density: SmoothingDensity, h: GridFunction) -> PositivityFloor:
    """
    Lower bound on P(Y + Z ⪰ h) from an unsmoothed ensemble of Y.

    c is the smallest sample norm with P(||Y|| <= c) > 1/2; the floor is
    ½·P(Z >= 2c + ||h||).
    """
    if base.smoothed:
        raise DomainError("positivity floor needs the unsmoothed ensemble")
    check_same_grid(base.grid, h.grid)
    norms = np.sort(np.max(np.abs(base.paths), axis=1))
    c = float(norms[base.n // 2])
    h_norm = sup_norm(h)
    floor = 0.5 * float(density.distribution.sf(2.0 * c + h_norm))
    return PositivityFloor(c=c, h_norm=h_norm, floor=floor)
