"""
hrdepth - A half-region depth laboratory for functional data.

This package simulates stochastic processes on finite grids, estimates
half-region depths empirically and exactly, and runs the experiments that
show where depth degenerates to zero and how smoothing restores it.

Example:
    >>> from hrdepth import DepthLabClient, GridFunction, ProcessKind, ProcessModel
    >>> client = DepthLabClient(jobs=1)
    >>> model = ProcessModel(kind=ProcessKind.BROWNIAN_MOTION)
    >>> ens = client.simulate(model, n=20_000, m=10, seed=7)
    >>> estimate = client.depth(ens, GridFunction.constant(ens.grid, 0.0))
    >>> abs(estimate.value - 0.1762) < 0.01
    True
"""

__version__ = "0.1.0"

# smoothing first: its operations import the processes package
from .smoothing import (
    DensityFamily,
    SmoothingDensity,
    TVShiftCheck,
    MarginShiftCheck,
    BracketWidthCheck,
    PositivityFloor,
    smooth_ensemble,
    grad_l1,
    tv_shift_check,
)
from .processes import (
    MarginalKind,
    MarginalSpec,
    ProcessKind,
    ProcessModel,
    PathEnsemble,
    ProcessSimulator,
    read_ensemble,
    write_ensemble,
)
from .client import DepthLabClient
from .config import Settings, get_settings
from .exceptions import ConfigError, DomainError, HRDepthError, NumericError, ResourceCapError
from .models import (
    # Run configuration
    RunConfig,
    ExperimentConfig,
    FamilyConfig,
    FunctionConfig,

    # Grid functions
    Grid,
    GridFunction,
    FamilyKind,
    FamilySpec,
    IndexSubset,
    EpsilonNet,
    EntropyEstimate,

    # Depth
    DepthEstimate,
    DifferenceCriterion,
    MinMinCheck,
    TailKind,
    TailModel,
    VerdictKind,
    ZeroDepthVerdict,

    # Experiments
    ExperimentKind,
    ExperimentReport,
    GapEstimate,
    LimitLawSummary,
    NormTailRow,
    NRow,
    TailRow,
    TrendRow,
)

__all__ = [
    "__version__",
    "DepthLabClient",
    "Settings",
    "get_settings",

    # Exceptions
    "HRDepthError",
    "DomainError",
    "ConfigError",
    "NumericError",
    "ResourceCapError",

    # Run configuration
    "RunConfig",
    "ExperimentConfig",
    "FamilyConfig",
    "FunctionConfig",

    # Grid functions
    "Grid",
    "GridFunction",
    "FamilyKind",
    "FamilySpec",
    "IndexSubset",
    "EpsilonNet",
    "EntropyEstimate",

    # Processes
    "MarginalKind",
    "MarginalSpec",
    "ProcessKind",
    "ProcessModel",
    "PathEnsemble",
    "ProcessSimulator",
    "read_ensemble",
    "write_ensemble",

    # Smoothing
    "DensityFamily",
    "SmoothingDensity",
    "TVShiftCheck",
    "MarginShiftCheck",
    "BracketWidthCheck",
    "PositivityFloor",
    "smooth_ensemble",
    "grad_l1",
    "tv_shift_check",

    # Depth
    "DepthEstimate",
    "DifferenceCriterion",
    "MinMinCheck",
    "TailKind",
    "TailModel",
    "VerdictKind",
    "ZeroDepthVerdict",

    # Experiments
    "ExperimentKind",
    "ExperimentReport",
    "GapEstimate",
    "LimitLawSummary",
    "NormTailRow",
    "NRow",
    "TailRow",
    "TrendRow",
]
