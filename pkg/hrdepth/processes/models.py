"""
Pydantic models for process generators, coordinate marginals and path ensembles.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..gridfn.models import Grid, GridFunction
from ..smoothing.models import SmoothingDensity


class MarginalKind(str, Enum):
    GAUSSIAN = "gaussian"
    POINT_MASS = "point-mass"
    TWO_POINT = "two-point"
    UNIFORM = "uniform"
    MIXTURE = "mixture"


class MarginalSpec(BaseModel):
    """
    Distribution of a single coordinate.

    ``two-point`` puts mass d on each of -c and +c and the remaining 1-2d at 0.
    ``mixture`` puts mass ``weight`` on ``atom`` and the rest on ``continuous``.
    """

    kind: MarginalKind
    mu: float = 0.0
    sigma: float = Field(1.0, gt=0)
    x: float = 0.0
    c: float = Field(1.0, gt=0)
    d: float = Field(0.5, gt=0, le=0.5)
    a: float = 0.0
    b: float = 1.0
    atom: float = 0.0
    weight: float = Field(0.0, ge=0, le=1)
    continuous: Optional["MarginalSpec"] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "MarginalSpec":
        if self.kind is MarginalKind.UNIFORM and not self.a < self.b:
            raise ValueError("uniform marginal needs a < b")
        if self.kind is MarginalKind.MIXTURE:
            if self.continuous is None or not self.continuous.is_continuous:
                raise ValueError("mixture marginal needs a continuous (gaussian or uniform) part")
        return self

    @classmethod
    def gaussian(cls, mu: float = 0.0, sigma: float = 1.0) -> "MarginalSpec":
        return cls(kind=MarginalKind.GAUSSIAN, mu=mu, sigma=sigma)

    @classmethod
    def point_mass(cls, x: float) -> "MarginalSpec":
        return cls(kind=MarginalKind.POINT_MASS, x=x)

    @classmethod
    def two_point(cls, c: float, d: float) -> "MarginalSpec":
        return cls(kind=MarginalKind.TWO_POINT, c=c, d=d)

    @classmethod
    def uniform(cls, a: float, b: float) -> "MarginalSpec":
        return cls(kind=MarginalKind.UNIFORM, a=a, b=b)

    @classmethod
    def mixture(cls, atom: float, weight: float, continuous: "MarginalSpec") -> "MarginalSpec":
        return cls(kind=MarginalKind.MIXTURE, atom=atom, weight=weight, continuous=continuous)

    @property
    def is_continuous(self) -> bool:
        return self.kind in (MarginalKind.GAUSSIAN, MarginalKind.UNIFORM)


class ProcessKind(str, Enum):
    BROWNIAN_MOTION = "bm"
    SYMMETRIC_STABLE = "stable"
    POISSON = "poisson"
    COMPOUND_POISSON = "compound-poisson"
    BROWNIAN_SHEET = "sheet"
    REFLECTED_BM = "reflected-bm"
    INTEGRATED_POISSON = "integrated-poisson"
    PRODUCT_SEQUENCE = "product"


_TIED_DOWN = {
    ProcessKind.BROWNIAN_MOTION,
    ProcessKind.SYMMETRIC_STABLE,
    ProcessKind.POISSON,
    ProcessKind.COMPOUND_POISSON,
    ProcessKind.BROWNIAN_SHEET,
    ProcessKind.REFLECTED_BM,
    ProcessKind.INTEGRATED_POISSON,
}

_CONTINUOUS_INCREMENTS = {
    ProcessKind.BROWNIAN_MOTION,
    ProcessKind.SYMMETRIC_STABLE,
    ProcessKind.BROWNIAN_SHEET,
}


class ProcessModel(BaseModel):
    """Declarative description of a simulated process, optionally smoothed by X = Y + Z."""

    kind: ProcessKind
    alpha: float = Field(2.0, gt=0, le=2)
    rate: float = Field(1.0, gt=0)
    jump: Optional[MarginalSpec] = None
    marginals: Optional[List[MarginalSpec]] = None
    smoothing: Optional[SmoothingDensity] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "ProcessModel":
        if self.kind is ProcessKind.COMPOUND_POISSON and self.jump is None:
            raise ValueError("compound-poisson needs a jump distribution")
        if self.kind is ProcessKind.PRODUCT_SEQUENCE and not self.marginals:
            raise ValueError("product sequence needs a non-empty marginals list")
        return self

    def smoothed(self, density: SmoothingDensity) -> "ProcessModel":
        return self.model_copy(update={"smoothing": density})

    @property
    def base(self) -> "ProcessModel":
        """The same process without smoothing."""
        return self.model_copy(update={"smoothing": None})

    @property
    def dim(self) -> int:
        return 2 if self.kind is ProcessKind.BROWNIAN_SHEET else 1

    @property
    def is_tied_down(self) -> bool:
        return self.smoothing is None and self.kind in _TIED_DOWN

    @property
    def has_zero_continuum_depth(self) -> bool:
        """Unsmoothed tied-down process with continuous increments: every function has depth 0."""
        return self.smoothing is None and self.kind in _CONTINUOUS_INCREMENTS

    @property
    def is_symmetric(self) -> bool:
        """X and -X have the same law."""
        if self.kind in _CONTINUOUS_INCREMENTS:
            return True
        if self.kind is ProcessKind.PRODUCT_SEQUENCE:
            return all(_symmetric_about_zero(s) for s in self.marginals or [])
        return False

    def grid(self, m: int) -> Grid:
        """Simulation grid: {0, 1/m, ..., 1}, the lattice for sheets, coordinates for products."""
        if self.kind is ProcessKind.BROWNIAN_SHEET:
            return Grid.lattice(m)
        if self.kind is ProcessKind.PRODUCT_SEQUENCE:
            k = len(self.marginals or [])
            return Grid(axes=(np.arange(1, k + 1) / k,))
        return Grid.uniform(m)

    def resolution(self, grid: Grid) -> int:
        """The m for which ``self.grid(m)`` is ``grid``."""
        if self.kind is ProcessKind.BROWNIAN_SHEET:
            m = grid.shape[0] - 1
        elif self.kind is ProcessKind.PRODUCT_SEQUENCE:
            m = grid.size
        else:
            m = grid.size - 1
        if m < 1 or not self.grid(m).same_as(grid):
            raise ValueError(f"grid does not match the simulation grid of a {self.kind.value} model")
        return m

    def descriptor(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude_none=True)


def _symmetric_about_zero(spec: MarginalSpec) -> bool:
    if spec.kind is MarginalKind.GAUSSIAN:
        return spec.mu == 0.0
    if spec.kind is MarginalKind.POINT_MASS:
        return spec.x == 0.0
    if spec.kind is MarginalKind.TWO_POINT:
        return True
    if spec.kind is MarginalKind.UNIFORM:
        return spec.a == -spec.b
    return spec.atom == 0.0 and spec.continuous is not None and _symmetric_about_zero(spec.continuous)


class PathEnsemble(BaseModel):
    """n sample paths on a shared grid, with provenance."""

    grid: Grid
    paths: np.ndarray
    model: Optional[ProcessModel] = None
    seed: Optional[int] = None
    smoothed: bool = False
    smoothing: Optional[SmoothingDensity] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("paths", mode="before")
    @classmethod
    def _coerce_paths(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("paths must be a non-empty (n, grid size) matrix")
        if not np.all(np.isfinite(arr)):
            raise ValueError("path values must be finite")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check(self) -> "PathEnsemble":
        if self.paths.shape[1] != self.grid.size:
            raise ValueError(
                f"paths have {self.paths.shape[1]} columns but the grid has {self.grid.size} points"
            )
        if self.model is not None and not self.smoothed and self.model.is_tied_down:
            if np.any(self.paths[:, 0] != 0.0):
                raise ValueError("tied-down ensemble must start at 0")
        return self

    @property
    def n(self) -> int:
        return int(self.paths.shape[0])

    @property
    def m(self) -> int:
        return self.grid.size

    def path(self, i: int) -> GridFunction:
        return GridFunction(grid=self.grid, values=self.paths[i])

    def metadata(self) -> Dict[str, Any]:
        """JSON sidecar content."""
        return {
            "model": self.model.descriptor() if self.model else None,
            "seed": self.seed,
            "n": self.n,
            "m": self.m,
            "dim": self.grid.dim,
            "smoothed": self.smoothed,
            "smoothing": self.smoothing.model_dump(mode="json") if self.smoothing else None,
        }


MarginalSpec.model_rebuild()
