"""
Distribution functions and samplers for coordinate marginals.
"""

from typing import Tuple

import numpy as np
from scipy import stats

from .models import MarginalKind, MarginalSpec


def marginal_cdf(spec: MarginalSpec, x: float) -> Tuple[float, float]:
    """
    Distribution function and its left limit at x.

    Args:
        spec: The coordinate marginal.
        x: Evaluation point.

    Returns:
        (F, F_left) with F = P(Z <= x) and F_left = P(Z < x).
    """
    kind = spec.kind
    if kind is MarginalKind.GAUSSIAN:
        F = float(stats.norm.cdf(x, loc=spec.mu, scale=spec.sigma))
        return F, F
    if kind is MarginalKind.UNIFORM:
        F = float(stats.uniform.cdf(x, loc=spec.a, scale=spec.b - spec.a))
        return F, F
    if kind is MarginalKind.POINT_MASS:
        return float(x >= spec.x), float(x > spec.x)
    if kind is MarginalKind.TWO_POINT:
        atoms = np.array([-spec.c, 0.0, spec.c])
        masses = np.array([spec.d, 1.0 - 2.0 * spec.d, spec.d])
        return float(masses[atoms <= x].sum()), float(masses[atoms < x].sum())
    # mixture
    p = spec.weight
    Fc, _ = marginal_cdf(spec.continuous, x)
    return p * float(x >= spec.atom) + (1 - p) * Fc, p * float(x > spec.atom) + (1 - p) * Fc


def tail_probabilities(spec: MarginalSpec, x: float) -> Tuple[float, float]:
    """(P(Z >= x), P(Z <= x)), computed from survival functions for continuous parts."""
    kind = spec.kind
    if kind is MarginalKind.GAUSSIAN:
        dist = stats.norm(loc=spec.mu, scale=spec.sigma)
        return float(dist.sf(x)), float(dist.cdf(x))
    if kind is MarginalKind.UNIFORM:
        dist = stats.uniform(loc=spec.a, scale=spec.b - spec.a)
        return float(dist.sf(x)), float(dist.cdf(x))
    if kind is MarginalKind.MIXTURE:
        p = spec.weight
        up, down = tail_probabilities(spec.continuous, x)
        return p * float(spec.atom >= x) + (1 - p) * up, p * float(spec.atom <= x) + (1 - p) * down
    if kind is MarginalKind.POINT_MASS:
        return float(spec.x >= x), float(spec.x <= x)
    atoms = np.array([-spec.c, 0.0, spec.c])
    masses = np.array([spec.d, 1.0 - 2.0 * spec.d, spec.d])
    return float(masses[atoms >= x].sum()), float(masses[atoms <= x].sum())


def sample_marginal(spec: MarginalSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    kind = spec.kind
    if kind is MarginalKind.GAUSSIAN:
        return rng.normal(spec.mu, spec.sigma, size)
    if kind is MarginalKind.UNIFORM:
        return rng.uniform(spec.a, spec.b, size)
    if kind is MarginalKind.POINT_MASS:
        return np.full(size, spec.x, dtype=float)
    if kind is MarginalKind.TWO_POINT:
        return rng.choice(
            np.array([-spec.c, 0.0, spec.c]), size=size, p=[spec.d, 1.0 - 2.0 * spec.d, spec.d]
        )
    on_atom = rng.random(size) < spec.weight
    values = sample_marginal(spec.continuous, rng, size)
    values[on_atom] = spec.atom
    return values
