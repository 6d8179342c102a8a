"""
Experiment harness for the depth laboratory.

Quick Start:
    >>> from hrdepth.analysis import ExperimentRunner
    >>> from hrdepth.gridfn import Grid, GridFunction
    >>> from hrdepth.processes import ProcessKind, ProcessModel
    >>> runner = ExperimentRunner()
    >>> h = GridFunction.constant(Grid.uniform(16), 0.0)
    >>> report = runner.zero_depth_trend(ProcessModel(kind=ProcessKind.BROWNIAN_MOTION), h, [4, 16], 10_000, seed=1)
    >>> [row.m for row in report.trend]
    [4, 16]
"""

from .models import (
    ExperimentKind,
    ExperimentReport,
    GapEstimate,
    LimitLawSummary,
    NormTailRow,
    NRow,
    TailRow,
    TrendRow,
)
from .plotting import plot_report, write_replicates_csv
from .runner import DEFAULT_N_REF, LIMIT_LAW_N_REF, ExperimentRunner

__all__ = [
    "ExperimentKind",
    "ExperimentReport",
    "GapEstimate",
    "LimitLawSummary",
    "NormTailRow",
    "NRow",
    "TailRow",
    "TrendRow",
    "ExperimentRunner",
    "DEFAULT_N_REF",
    "LIMIT_LAW_N_REF",
    "plot_report",
    "write_replicates_csv",
]
