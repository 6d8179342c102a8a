"""
Process models and seeded path simulation.

Quick Start:
    >>> from hrdepth.processes import ProcessKind, ProcessModel, ProcessSimulator
    >>> sim = ProcessSimulator()
    >>> ens = sim.simulate(ProcessModel(kind=ProcessKind.BROWNIAN_MOTION), n=1000, m=64, seed=7)
    >>> ens.paths.shape
    (1000, 65)
"""

from .io import read_ensemble, sidecar_path, write_ensemble
from .marginals import marginal_cdf, sample_marginal, tail_probabilities
from .models import (
    MarginalKind,
    MarginalSpec,
    PathEnsemble,
    ProcessKind,
    ProcessModel,
)
from .simulator import ProcessSimulator, brownian_bridge_refine, smoothing_offsets
from .streams import StreamTag, block_generator, derive_seed, rows_per_block

__all__ = [
    "MarginalKind",
    "MarginalSpec",
    "ProcessKind",
    "ProcessModel",
    "PathEnsemble",
    "ProcessSimulator",
    "brownian_bridge_refine",
    "smoothing_offsets",
    "marginal_cdf",
    "sample_marginal",
    "tail_probabilities",
    "read_ensemble",
    "write_ensemble",
    "sidecar_path",
    "StreamTag",
    "block_generator",
    "derive_seed",
    "rows_per_block",
]
