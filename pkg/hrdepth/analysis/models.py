"""
Pydantic models for experiment reports.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class ExperimentKind(str, Enum):
    ZERO_TREND = "zero-trend"
    CONSISTENCY = "consistency"
    RATE = "rate"
    LIMIT_LAW = "limit-law"
    SUBSET = "subset"
    C2_GAP = "c2-gap"
    NORM_TAIL = "norm-tail"


class NRow(BaseModel):
    """Summary of one sample size over all replications."""

    n: int = Field(ge=1)
    reps: int = Field(ge=1)
    sup_error: float = Field(ge=0, description="median of sup |D_n - D|")
    q50: float
    q95: float
    q99: float
    statistic: str = "sup_error"


class TailRow(BaseModel):
    r: float
    exceedance: float = Field(ge=0, le=1)


class TrendRow(BaseModel):
    m: int = Field(ge=1)
    depth: float = Field(ge=0, le=1)
    standard_error: float = Field(ge=0)
    count_above: int = Field(ge=0)
    count_below: int = Field(ge=0)
    exact: Optional[float] = Field(None, ge=0, le=1)


class NormTailRow(BaseModel):
    r: float
    max_depth: float = Field(ge=0, le=1)
    bound: float = Field(ge=0)
    functions: int = Field(ge=1)

    @property
    def holds(self) -> bool:
        return self.max_depth <= self.bound


class LimitLawSummary(BaseModel):
    """√n(D_n(h) - D(h)) over replications, against its Gaussian limit."""

    tie: bool
    ambiguous: bool
    F: float = Field(ge=0, le=1, description="oracle P(X ⪰ h)")
    G: float = Field(ge=0, le=1, description="oracle P(X ⪯ h)")
    FG: float = Field(ge=0, le=1, description="oracle P(X ⪰ h and X ⪯ h)")
    depth: float = Field(ge=0, le=1)
    mean: float
    variance: float = Field(ge=0)
    mean_se: float = Field(ge=0)
    predicted_mean: float
    predicted_variance: float = Field(ge=0)
    z_score: float


class GapEstimate(BaseModel):
    """|P(h1 ⪯ X) - P(h2 ⪯ X)| with a normal-approximation CI."""

    gap: float = Field(ge=0, le=1)
    p1: float = Field(ge=0, le=1)
    p2: float = Field(ge=0, le=1)
    n: int = Field(ge=1)
    standard_error: float = Field(ge=0)
    ci_half_width: float = Field(ge=0)


class ExperimentReport(BaseModel):
    """Result of one experiment run; serialized as the report JSON."""

    kind: ExperimentKind
    model: Optional[Dict[str, Any]] = None
    seed: int
    config_hash: Optional[str] = None
    rows: List[NRow] = Field(default_factory=list)
    trend: List[TrendRow] = Field(default_factory=list)
    tail: List[TailRow] = Field(default_factory=list)
    norm_tail: List[NormTailRow] = Field(default_factory=list)
    fitted_alpha: Optional[float] = None
    r_squared: Optional[float] = None
    certified_alpha: Optional[float] = None
    degenerate: bool = False
    modulus_correction: Optional[float] = None
    limit_law: Optional[LimitLawSummary] = None
    gap: Optional[GapEstimate] = None
    oracle: Dict[str, Any] = Field(default_factory=dict)
    wall_clock: float = Field(0.0, ge=0)
    replicates: List[Dict[str, float]] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentReport":
        ns = [row.n for row in self.rows]
        if ns != sorted(ns):
            raise ValueError("rows must be sorted by n")
        if self.fitted_alpha is not None and sum(1 for t in self.tail if t.exceedance > 0) < 4:
            raise ValueError("fitted alpha needs at least 4 tail points with positive exceedance")
        return self

    def report(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
