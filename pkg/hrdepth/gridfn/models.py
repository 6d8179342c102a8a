"""
Pydantic models for finite-grid functions.

A grid is the computable stand-in for the countable index set the depth is
defined over: all suprema and infima become exact maxima and minima over
grid points.
"""

from enum import Enum
from typing import Any, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(values: Any, dtype: Any = float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class Grid(BaseModel):
    """Ordered index set: strictly increasing points in [0,1] or a lattice in [0,1]²."""

    axes: Tuple[np.ndarray, ...]

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("axes", mode="before")
    @classmethod
    def _coerce_axes(cls, v: Any) -> Tuple[np.ndarray, ...]:
        if isinstance(v, np.ndarray) and v.ndim == 1:
            v = (v,)
        axes = tuple(_frozen_array(a) for a in v)
        if len(axes) not in (1, 2):
            raise ValueError("grid must have one or two axes")
        for a in axes:
            if a.ndim != 1 or a.size == 0:
                raise ValueError("each grid axis must be a non-empty 1-D sequence")
            if not np.all(np.isfinite(a)):
                raise ValueError("grid points must be finite")
            if np.any(np.diff(a) <= 0):
                raise ValueError("grid axes must be strictly increasing")
            if a[0] < 0.0 or a[-1] > 1.0:
                raise ValueError("grid points must lie in [0, 1]")
        return axes

    @classmethod
    def uniform(cls, m: int) -> "Grid":
        """The 1-D grid {0, 1/m, ..., 1} with m+1 points."""
        if m < 1:
            raise ValueError("m must be a positive integer")
        return cls(axes=(np.arange(m + 1) / m,))

    @classmethod
    def lattice(cls, m: int) -> "Grid":
        """The (m+1) x (m+1) lattice {0, 1/m, ..., 1}²."""
        if m < 1:
            raise ValueError("m must be a positive integer")
        axis = np.arange(m + 1) / m
        return cls(axes=(axis, axis))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def points(self) -> np.ndarray:
        """Grid points as a (size, dim) array, row-major for lattices."""
        if self.dim == 1:
            return self.axes[0][:, None]
        t1, t2 = np.meshgrid(self.axes[0], self.axes[1], indexing="ij")
        return np.column_stack([t1.ravel(), t2.ravel()])

    def same_as(self, other: "Grid") -> bool:
        return self.dim == other.dim and all(
            a.shape == b.shape and np.array_equal(a, b) for a, b in zip(self.axes, other.axes)
        )

    def subsample(self, step: int) -> Tuple["Grid", np.ndarray]:
        """
        Every ``step``-th point along each axis.

        Returns:
            The coarser grid and the flat indices of its points in this grid.
        """
        if step < 1 or any((n - 1) % step for n in self.shape):
            raise ValueError(f"step {step} does not divide the grid resolution")
        picks = [np.arange(0, n, step) for n in self.shape]
        coarse = Grid(axes=tuple(a[p] for a, p in zip(self.axes, picks)))
        if self.dim == 1:
            return coarse, picks[0]
        i, j = np.meshgrid(picks[0], picks[1], indexing="ij")
        return coarse, (i * self.shape[1] + j).ravel()


class GridFunction(BaseModel):
    """A real function known at every point of a grid."""

    grid: Grid
    values: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("values", mode="before")
    @classmethod
    def _coerce_values(cls, v: Any) -> np.ndarray:
        arr = _frozen_array(v).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("function values must be finite")
        return arr

    @model_validator(mode="after")
    def _check_length(self) -> "GridFunction":
        if self.values.size != self.grid.size:
            raise ValueError(
                f"values has {self.values.size} entries but the grid has {self.grid.size} points"
            )
        return self

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid=grid, values=np.full(grid.size, float(c)))

    @classmethod
    def from_callable(cls, grid: Grid, fn: Any) -> "GridFunction":
        """Evaluate ``fn`` at every grid point (``fn(t)`` in 1-D, ``fn(t1, t2)`` in 2-D)."""
        pts = grid.points
        return cls(grid=grid, values=fn(*pts.T))

    def shifted(self, delta: float) -> "GridFunction":
        return GridFunction(grid=self.grid, values=self.values + delta)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        if not self.grid.same_as(other.grid):
            raise ValueError("cannot subtract functions on different grids")
        return GridFunction(grid=self.grid, values=self.values - other.values)

    def __neg__(self) -> "GridFunction":
        return GridFunction(grid=self.grid, values=-self.values)


class FamilyKind(str, Enum):
    """Supported function families."""

    CONSTANTS = "constants"
    FINITE_LIST = "finite-list"
    LIPSCHITZ_BALL = "lipschitz-ball"
    SMOOTH_BALL = "smooth-ball"


class FamilySpec(BaseModel):
    """A sup-norm compact family of grid functions."""

    kind: FamilyKind
    grid: Grid
    radius: float = Field(1.0, gt=0)
    lipschitz: float = Field(0.0, ge=0)
    derivative_lipschitz: float = Field(0.0, ge=0)
    functions: List[GridFunction] = Field(default_factory=list)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def _check_kind(self) -> "FamilySpec":
        if self.kind is FamilyKind.FINITE_LIST:
            if not self.functions:
                raise ValueError("a finite-list family needs at least one function")
            for f in self.functions:
                if not f.grid.same_as(self.grid):
                    raise ValueError("finite-list functions must share the family grid")
        if self.kind in (FamilyKind.LIPSCHITZ_BALL, FamilyKind.SMOOTH_BALL) and self.grid.dim != 1:
            raise ValueError(f"{self.kind.value} families are defined on 1-D grids only")
        return self

    @classmethod
    def constants(cls, grid: Grid, radius: float) -> "FamilySpec":
        return cls(kind=FamilyKind.CONSTANTS, grid=grid, radius=radius)

    @classmethod
    def finite_list(cls, functions: Sequence[GridFunction]) -> "FamilySpec":
        functions = list(functions)
        radius = max((float(np.max(np.abs(f.values))) for f in functions), default=0.0)
        return cls(
            kind=FamilyKind.FINITE_LIST,
            grid=functions[0].grid if functions else Grid.uniform(1),
            radius=max(radius, 1e-12),
            functions=functions,
        )

    def with_grid(self, grid: Grid) -> "FamilySpec":
        return self.model_copy(update={"grid": grid})


class IndexSubset(BaseModel):
    """Sorted distinct positions into a grid."""

    indices: Tuple[int, ...]

    model_config = ConfigDict(frozen=True)

    @field_validator("indices", mode="before")
    @classmethod
    def _coerce_indices(cls, v: Any) -> Tuple[int, ...]:
        idx = [int(i) for i in v]
        if not idx:
            raise ValueError("an index subset must contain at least one index")
        if len(set(idx)) != len(idx):
            raise ValueError("index subset contains duplicates")
        if min(idx) < 0:
            raise ValueError("indices must be non-negative")
        return tuple(sorted(idx))

    @classmethod
    def full(cls, grid: Grid) -> "IndexSubset":
        return cls(indices=tuple(range(grid.size)))

    @property
    def cardinality(self) -> int:
        return len(self.indices)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def fits(self, grid: Grid) -> bool:
        return self.indices[-1] < grid.size

    def issubset(self, other: "IndexSubset") -> bool:
        return set(self.indices) <= set(other.indices)

class EpsilonNet(BaseModel):
    """Finite set of centers covering a family within sup-norm eps."""

    centers: List[GridFunction]
    eps: float = Field(gt=0)

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def count(self) -> int:
        return len(self.centers)

    @property
    def matrix(self) -> np.ndarray:
        """Centers stacked as a (count, grid size) array."""
        return np.vstack([c.values for c in self.centers])


class EntropyEstimate(BaseModel):
    """Numeric value of the entropy integral over [eps_min, eps_max]."""

    value: float
    divergence_flag: bool
    growth_ratio: float
    eps_min: float
    eps_max: float
