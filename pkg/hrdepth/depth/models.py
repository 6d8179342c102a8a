"""
Pydantic models for depth estimates, zero-depth verdicts and tail descriptors.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DepthEstimate(BaseModel):
    """
    Empirical half-region depth min(count_above, count_below) / n.

    ``ci_half_width`` is the normal-approximation half width of the smaller
    of the two binomial proportions.
    """

    value: float = Field(ge=0, le=1)
    count_above: int = Field(ge=0)
    count_below: int = Field(ge=0)
    count_both: int = Field(0, ge=0)
    n: int = Field(ge=1)
    ci_half_width: float = Field(ge=0)
    grid_size: int = Field(ge=1)
    subset: Optional[List[int]] = None
    intervals: Optional[List[List[int]]] = None
    seed: Optional[int] = None
    model: Optional[Dict[str, Any]] = None
    oracle: bool = False

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_counts(self) -> "DepthEstimate":
        if max(self.count_above, self.count_below) > self.n:
            raise ValueError("counts cannot exceed n")
        if self.count_both > min(self.count_above, self.count_below):
            raise ValueError("count_both cannot exceed either one-sided count")
        if abs(self.value - min(self.count_above, self.count_below) / self.n) > 1e-12:
            raise ValueError("value must equal min(count_above, count_below) / n")
        return self

    @classmethod
    def from_counts(cls, above: int, below: int, n: int, z: float, **metadata: Any) -> "DepthEstimate":
        low = min(above, below)
        p = low / n
        return cls(
            value=p,
            count_above=above,
            count_below=below,
            n=n,
            ci_half_width=z * math.sqrt(p * (1.0 - p) / n),
            **metadata,
        )

    @property
    def above_fraction(self) -> float:
        return self.count_above / self.n

    @property
    def below_fraction(self) -> float:
        return self.count_below / self.n

    @property
    def both_fraction(self) -> float:
        return self.count_both / self.n

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.value * (1.0 - self.value) / self.n)

    def report(self) -> Dict[str, Any]:
        """Depth report JSON content."""
        return self.model_dump(mode="json", exclude_none=True)


class VerdictKind(str, Enum):
    ZERO_BY_BOUNDARY = "zero-by-boundary"
    ZERO_BY_DIVERGENCE = "zero-by-divergence"
    POSITIVE = "positive"


class ZeroDepthVerdict(BaseModel):
    """Outcome of the zero-depth test for a product measure."""

    kind: VerdictKind
    value: float = Field(0.0, ge=0, le=1)
    witness: Optional[int] = None
    side: Optional[str] = None
    partial_sums: Optional[Dict[int, float]] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "ZeroDepthVerdict":
        if self.kind is VerdictKind.POSITIVE and not self.value > 0:
            raise ValueError("a positive verdict needs a positive depth value")
        if self.kind is not VerdictKind.POSITIVE and self.value != 0:
            raise ValueError("a zero verdict carries value 0")
        return self

    @property
    def is_zero(self) -> bool:
        return self.kind is not VerdictKind.POSITIVE


class TailKind(str, Enum):
    NONE = "none"
    CONSTANT = "constant"
    GEOMETRIC = "geometric"
    POWER = "power"


class TailModel(BaseModel):
    """
    P(Z_t != a_t) = q_t for coordinates past the explicit list.

    q_t is ``scale`` (constant), ``scale * ratio**t`` (geometric) or
    ``scale * t**-exponent`` (power), with t the 1-based coordinate index.
    A share ``up`` of that mass lies above a_t and ``down`` below it.
    """

    kind: TailKind = TailKind.NONE
    scale: float = Field(0.0, ge=0, le=1)
    ratio: float = 0.5
    exponent: float = 2.0
    up: float = Field(0.5, ge=0, le=1)
    down: float = Field(0.5, ge=0, le=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "TailModel":
        if abs(self.up + self.down - 1.0) > 1e-12:
            raise ValueError("tail shares up and down must sum to 1")
        if self.kind is TailKind.GEOMETRIC and not 0 < self.ratio < 1:
            raise ValueError("geometric tail needs 0 < ratio < 1")
        if self.kind is TailKind.POWER and not self.exponent > 0:
            raise ValueError("power tail needs a positive exponent")
        if self.kind is not TailKind.NONE and self.scale == 0:
            raise ValueError(f"{self.kind.value} tail needs a positive scale")
        return self

    @classmethod
    def none(cls) -> "TailModel":
        return cls()

    @classmethod
    def constant(cls, scale: float, up: float = 0.5) -> "TailModel":
        return cls(kind=TailKind.CONSTANT, scale=scale, up=up, down=1.0 - up)

    @classmethod
    def geometric(cls, scale: float, ratio: float, up: float = 0.5) -> "TailModel":
        return cls(kind=TailKind.GEOMETRIC, scale=scale, ratio=ratio, up=up, down=1.0 - up)

    @classmethod
    def power(cls, scale: float, exponent: float, up: float = 0.5) -> "TailModel":
        return cls(kind=TailKind.POWER, scale=scale, exponent=exponent, up=up, down=1.0 - up)

    @property
    def summable(self) -> bool:
        if self.kind is TailKind.NONE or self.kind is TailKind.GEOMETRIC:
            return True
        if self.kind is TailKind.CONSTANT:
            return False
        return self.exponent > 1

    def q(self, t: Any) -> Any:
        """P(Z_t != a_t) at 1-based index t (scalar or array)."""
        if self.kind is TailKind.NONE:
            return 0.0 * t
        if self.kind is TailKind.CONSTANT:
            return self.scale + 0.0 * t
        if self.kind is TailKind.GEOMETRIC:
            return self.scale * self.ratio**t
        return self.scale * t ** (-self.exponent)


class DifferenceCriterion(BaseModel):
    """
    Estimate of P(X - Y ⪯_S 0) from independent pairs.

    Every h satisfies D(h)² <= P(X - Y ⪯_S 0), so ``depth_bound`` caps the
    depth of all functions at once and a zero probability forces zero depth.
    """

    probability: float = Field(ge=0, le=1)
    pairs: int = Field(ge=1)
    standard_error: float = Field(ge=0)
    subset: List[int]

    @property
    def depth_bound(self) -> float:
        return math.sqrt(self.probability)


class MinMinCheck(BaseModel):
    """|min(F_n, G_n) - min(F, G)| against |F_n - F| + |G_n - G|."""

    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + 1e-15
