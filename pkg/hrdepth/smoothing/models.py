"""
Pydantic model for the smoothing density of Z in X = Y + Z.
"""

import math
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats


class DensityFamily(str, Enum):
    """Shipped smoothing families; all are symmetric, unimodal and positive on R."""

    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"
    CAUCHY = "cauchy"


class SmoothingDensity(BaseModel):
    """Density of the smoothing variable Z; serialized as {"family": ..., "scale": ...}."""

    family: DensityFamily
    scale: float = Field(gt=0)

    model_config = ConfigDict(frozen=True)

    @property
    def distribution(self) -> Any:
        """The frozen scipy distribution of Z."""
        if self.family is DensityFamily.GAUSSIAN:
            return stats.norm(scale=self.scale)
        if self.family is DensityFamily.LAPLACE:
            return stats.laplace(scale=self.scale)
        return stats.cauchy(scale=self.scale)

    @property
    def mode_density(self) -> float:
        """f_Z(0), the density at the mode."""
        if self.family is DensityFamily.GAUSSIAN:
            return 1.0 / (self.scale * math.sqrt(2.0 * math.pi))
        if self.family is DensityFamily.LAPLACE:
            return 1.0 / (2.0 * self.scale)
        return 1.0 / (math.pi * self.scale)

    @property
    def grad_l1(self) -> float:
        """Closed-form integral of |f_Z'|; equals 2 f_Z(0) for symmetric unimodal densities."""
        return 2.0 * self.mode_density

    def pdf(self, x: Any) -> Any:
        return self.distribution.pdf(x)

    def cdf(self, x: Any) -> Any:
        return self.distribution.cdf(x)

    def derivative(self, x: Any) -> Any:
        """f_Z'(x); the Laplace derivative is taken as 0 at the kink."""
        x = np.asarray(x, dtype=float)
        s = self.scale
        f = self.pdf(x)
        if self.family is DensityFamily.GAUSSIAN:
            return -x / s**2 * f
        if self.family is DensityFamily.LAPLACE:
            return -np.sign(x) / s * f
        return -2.0 * x / (s**2 + x**2) * f

    def sample(self, rng: np.random.Generator, size: Any) -> np.ndarray:
        if self.family is DensityFamily.GAUSSIAN:
            return rng.normal(0.0, self.scale, size)
        if self.family is DensityFamily.LAPLACE:
            return rng.laplace(0.0, self.scale, size)
        return self.scale * rng.standard_cauchy(size)


class TVShiftCheck(BaseModel):
    """Shift bound: lhs = ∫|f(x+delta) - f(x)| dx must not exceed rhs = |delta|·∫|f'|."""

    delta: float
    lhs: float
    rhs: float
    w3_bound: float
    abs_error: float = 0.0

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + self.abs_error


class MarginShiftCheck(BaseModel):
    """Empirical |P(W_h1 >= x) - P(W_h2 >= x)| against 2·||h1 - h2||·∫|f'|."""

    x: float
    p1: float
    p2: float
    difference: float
    bound: float
    standard_error: float
    passed: bool


class BracketWidthCheck(BaseModel):
    """Empirical P(X >= h - delta) - P(X >= h + delta) against 4·delta·∫|f'|."""

    delta: float
    width: float
    bound: float
    standard_error: float
    passed: bool


class PositivityFloor(BaseModel):
    """Lower bound ½·P(Z >= 2c + ||h||) on the depth of h, with c a median of ||Y||."""

    c: float
    h_norm: float
    floor: float
