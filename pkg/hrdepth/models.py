"""
Pydantic models for hrdepth.

Re-exports the models of every sub-package and defines the run-level
configuration accepted by the command line and by ``--config`` files.
"""

import hashlib
import json
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import DomainError
from .gridfn.io import read_grid_function
from .gridfn.models import *  # noqa: F401,F403
from .gridfn.models import FamilyKind, FamilySpec, Grid, GridFunction, IndexSubset
from .smoothing.models import *  # noqa: F401,F403
from .smoothing.models import SmoothingDensity
from .processes.models import *  # noqa: F401,F403
from .processes.models import MarginalSpec, ProcessModel
from .depth.models import *  # noqa: F401,F403
from .depth.models import TailModel
from .analysis.models import *  # noqa: F401,F403


class FunctionConfig(BaseModel):
    """A query function: a constant or a grid-function CSV."""

    constant: Optional[float] = None
    path: Optional[str] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _one_source(self) -> "FunctionConfig":
        if (self.constant is None) == (self.path is None):
            raise ValueError("give exactly one of 'constant' or 'path'")
        return self

    def build(self, grid: Grid) -> GridFunction:
        if self.constant is not None:
            return GridFunction.constant(grid, self.constant)
        h = read_grid_function(self.path)
        if not h.grid.same_as(grid):
            raise DomainError(f"{self.path} is not on the {grid.size}-point simulation grid")
        return h


class FamilyConfig(BaseModel):
    """A function family; finite lists are given as constants or grid-function CSVs."""

    kind: FamilyKind
    radius: float = Field(1.0, gt=0)
    lipschitz: float = Field(0.0, ge=0)
    derivative_lipschitz: float = Field(0.0, ge=0)
    constants: Optional[List[float]] = None
    paths: Optional[List[str]] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _finite_list_source(self) -> "FamilyConfig":
        if self.kind is FamilyKind.FINITE_LIST and not (self.constants or self.paths):
            raise ValueError("a finite-list family needs 'constants' or 'paths'")
        return self

    def build(self, grid: Grid) -> FamilySpec:
        if self.kind is FamilyKind.FINITE_LIST:
            functions = [GridFunction.constant(grid, c) for c in self.constants or []]
            functions += [FunctionConfig(path=p).build(grid) for p in self.paths or []]
            return FamilySpec.finite_list(functions)
        return FamilySpec(
            kind=self.kind,
            grid=grid,
            radius=self.radius,
            lipschitz=self.lipschitz,
            derivative_lipschitz=self.derivative_lipschitz,
        )


class Command(str, Enum):
    SIMULATE = "simulate"
    SMOOTH = "smooth"
    DEPTH = "depth"
    EXACT = "exact"
    CHECK = "check"
    EXPERIMENT = "experiment"


class RunConfig(BaseModel):
    """
    Everything a CLI run needs; unknown keys are rejected.

    The published JSON schema is ``RunConfig.model_json_schema()``
    (``hrdepth schema``).
    """

    command: Command
    target: Optional[str] = Field(None, description="check name or experiment kind")
    model: Optional[ProcessModel] = None
    density: Optional[SmoothingDensity] = None
    family: Optional[FamilyConfig] = None
    h: Optional[FunctionConfig] = None
    h2: Optional[FunctionConfig] = None
    marginals: Optional[List[MarginalSpec]] = None
    a: Optional[List[float]] = None
    tail: Optional[TailModel] = None
    subset: Optional[List[int]] = None
    intervals: Optional[List[List[int]]] = None
    n: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=1)
    seed: int = 0
    n_schedule: Optional[List[int]] = None
    m_schedule: Optional[List[int]] = None
    reps: int = Field(100, ge=1)
    r: Optional[int] = Field(None, ge=1)
    r_grid: Optional[List[float]] = None
    n_ref: Optional[int] = Field(None, ge=1)
    n_subsets: int = Field(200, ge=1)
    eps: Optional[float] = Field(None, gt=0)
    delta: Optional[float] = None
    paths: Optional[str] = Field(None, description="input ensemble CSV")
    out: Optional[str] = None
    plot: Optional[str] = None
    csv: Optional[str] = Field(None, description="per-replication CSV")
    jobs: Optional[int] = Field(None, ge=1)

    model_config = ConfigDict(extra="forbid")

    def index_subset(self) -> Optional[IndexSubset]:
        return IndexSubset(indices=self.subset) if self.subset is not None else None

    def config_hash(self) -> str:
        """sha256 of the run-defining fields; output locations and job count are excluded."""
        payload = self.model_dump(mode="json", exclude={"out", "plot", "csv", "jobs"})
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def embedded(self) -> Dict[str, Any]:
        """The config as stored inside reports."""
        return self.model_dump(mode="json", exclude_none=True, exclude={"out", "plot", "csv", "jobs"})

    def experiment(self) -> "ExperimentConfig":
        return ExperimentConfig.model_validate(
            self.model_dump(include=set(ExperimentConfig.model_fields), exclude_none=True)
        )


class ExperimentConfig(BaseModel):
    """Inputs of one experiment; query functions are built on the model's grid."""

    model: ProcessModel
    family: Optional[FamilyConfig] = None
    h: Optional[FunctionConfig] = None
    h2: Optional[FunctionConfig] = None
    n: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=1)
    seed: int = 0
    n_schedule: Optional[List[int]] = None
    m_schedule: Optional[List[int]] = None
    reps: int = Field(100, ge=1)
    r: Optional[int] = Field(None, ge=1)
    r_grid: Optional[List[float]] = None
    n_ref: Optional[int] = Field(None, ge=1)
    n_subsets: int = Field(200, ge=1)
    eps: Optional[float] = Field(None, gt=0)

    model_config = ConfigDict(extra="forbid")

    def need(self, *names: str) -> None:
        missing = [name for name in names if getattr(self, name) is None]
        if missing:
            raise ValueError(f"missing experiment settings: {', '.join(missing)}")
