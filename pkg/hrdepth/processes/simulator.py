"""
Seeded path simulation for every supported process model.
"""

import logging
import math
from typing import Callable, Iterator, List, Optional, Tuple, TypeVar

import numpy as np

from ..config import Settings, get_settings
from ..exceptions import DomainError, ResourceCapError
from ..gridfn.models import Grid
from ..smoothing.models import SmoothingDensity
from .marginals import sample_marginal
from .models import MarginalSpec, PathEnsemble, ProcessKind, ProcessModel
from .streams import StreamTag, block_generator, iter_block_bounds, run_blocks

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _stable_standard(rng: np.random.Generator, alpha: float, shape: Tuple[int, ...]) -> np.ndarray:
    """Symmetric alpha-stable draws with characteristic function exp(-|u|^alpha) (Chambers-Mallows-Stuck)."""
    phi = (rng.random(shape) - 0.5) * np.pi
    w = rng.standard_exponential(shape)
    if alpha == 1.0:
        return np.tan(phi)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(phi)
    return (np.cos((1.0 - alpha) * phi) / w) ** (1.0 / alpha - 1.0) * np.sin(alpha * phi) / np.cos(phi) ** (
        1.0 / alpha
    )


def _tie_down(increments: np.ndarray) -> np.ndarray:
    rows = increments.shape[0]
    return np.concatenate((np.zeros((rows, 1)), np.cumsum(increments, axis=1)), axis=1)


def _arrivals(rng: np.random.Generator, rows: int, rate: float) -> Tuple[np.ndarray, np.ndarray]:
    """Row indices and times in (0, 1] of Poisson arrivals built from exponential gaps."""
    width = int(rate + 6.0 * math.sqrt(rate) + 10.0)
    times = np.cumsum(rng.standard_exponential((rows, width)) / rate, axis=1)
    row_idx = np.broadcast_to(np.arange(rows)[:, None], times.shape)
    keep = times <= 1.0
    out_rows, out_times = [row_idx[keep]], [times[keep]]
    pending = np.flatnonzero(times[:, -1] <= 1.0)
    last = times[pending, -1]
    while pending.size:
        more = last[:, None] + np.cumsum(rng.standard_exponential((pending.size, width)) / rate, axis=1)
        keep = more <= 1.0
        out_rows.append(np.broadcast_to(pending[:, None], more.shape)[keep])
        out_times.append(more[keep])
        still = more[:, -1] <= 1.0
        pending, last = pending[still], more[still, -1]
    return np.concatenate(out_rows), np.concatenate(out_times)


def _counting_paths(
    rng: np.random.Generator, rows: int, m: int, rate: float, jump: Optional[MarginalSpec]
) -> np.ndarray:
    row_idx, times = _arrivals(rng, rows, rate)
    cells = np.clip(np.ceil(times * m).astype(np.int64), 1, m)
    weights = None if jump is None else sample_marginal(jump, rng, times.size)
    counts = np.bincount(row_idx * (m + 1) + cells, weights=weights, minlength=rows * (m + 1))
    return np.cumsum(counts.reshape(rows, m + 1).astype(float), axis=1)


def _base_block(model: ProcessModel, rng: np.random.Generator, rows: int, m: int) -> np.ndarray:
    dt = 1.0 / m
    kind = model.kind
    if kind in (ProcessKind.BROWNIAN_MOTION, ProcessKind.REFLECTED_BM):
        paths = _tie_down(rng.standard_normal((rows, m)) * math.sqrt(dt))
        return np.maximum(paths, 0.0) if kind is ProcessKind.REFLECTED_BM else paths
    if kind is ProcessKind.SYMMETRIC_STABLE:
        scale = (dt / 2.0) ** (1.0 / model.alpha)
        return _tie_down(_stable_standard(rng, model.alpha, (rows, m)) * scale)
    if kind is ProcessKind.POISSON:
        return _counting_paths(rng, rows, m, model.rate, None)
    if kind is ProcessKind.COMPOUND_POISSON:
        return _counting_paths(rng, rows, m, model.rate, model.jump)
    if kind is ProcessKind.INTEGRATED_POISSON:
        counts = _counting_paths(rng, rows, m, model.rate, None)
        return _tie_down(counts[:, :-1] * dt)
    if kind is ProcessKind.BROWNIAN_SHEET:
        sheet = np.zeros((rows, m + 1, m + 1))
        sheet[:, 1:, 1:] = np.cumsum(np.cumsum(rng.standard_normal((rows, m, m)) * dt, axis=1), axis=2)
        return sheet.reshape(rows, -1)
    if kind is ProcessKind.PRODUCT_SEQUENCE:
        return np.column_stack([sample_marginal(spec, rng, rows) for spec in model.marginals])
    raise DomainError(f"unsupported process kind: {kind}")


def smoothing_offsets(density: SmoothingDensity, n: int, points: int, seed: int) -> np.ndarray:
    """One Z_j per row, drawn block-wise from the smoothing stream."""
    parts = [
        density.sample(block_generator(seed, StreamTag.SMOOTHING, b), stop - start)
        for b, start, stop in iter_block_bounds(n, points)
    ]
    return np.concatenate(parts)


class ProcessSimulator:
    """Generates PathEnsembles for a ProcessModel, block by block."""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Args:
            settings: Runtime settings; read from the environment if omitted.
        """
        self.settings = settings or get_settings()

    def _check(self, model: ProcessModel, n: int, m: int) -> Grid:
        if n < 1 or m < 1:
            raise DomainError(f"n and m must be positive, got n={n}, m={m}")
        if model.kind is ProcessKind.PRODUCT_SEQUENCE and m != len(model.marginals):
            raise DomainError(f"product sequence has {len(model.marginals)} coordinates, got m={m}")
        return model.grid(m)

    def _block(self, model: ProcessModel, seed: int, m: int, b: int, start: int, stop: int) -> np.ndarray:
        rows = stop - start
        paths = _base_block(model, block_generator(seed, StreamTag.PATHS, b), rows, m)
        if model.smoothing is not None:
            z = model.smoothing.sample(block_generator(seed, StreamTag.SMOOTHING, b), rows)
            paths = paths + z[:, None]
        return paths

    def simulate(self, model: ProcessModel, n: int, m: int, seed: int) -> PathEnsemble:
        """
        Simulate n independent paths.

        Args:
            model: Process description; smoothing, if set, is applied per path.
            n: Number of paths.
            m: Grid resolution (per axis for sheets, coordinate count for products).
            seed: Master seed.

        Returns:
            PathEnsemble identical for identical (model, n, m, seed) at any job count.
        """
        grid = self._check(model, n, m)
        if model.kind is ProcessKind.BROWNIAN_SHEET and n * grid.size > self.settings.sheet_max_points:
            raise ResourceCapError(
                f"sheet ensemble needs {n * grid.size} values, cap is {self.settings.sheet_max_points}"
            )
        logger.debug("simulating %s: n=%d m=%d seed=%d", model.kind.value, n, m, seed)
        blocks = run_blocks(
            lambda b, start, stop: self._block(model, seed, m, b, start, stop),
            n,
            grid.size,
            self.settings.jobs,
        )
        return PathEnsemble(
            grid=grid,
            paths=np.concatenate(blocks, axis=0),
            model=model,
            seed=seed,
            smoothed=model.smoothing is not None,
            smoothing=model.smoothing,
        )

    def iter_blocks(self, model: ProcessModel, n: int, m: int, seed: int) -> Iterator[np.ndarray]:
        """Yield the rows of ``simulate(model, n, m, seed)`` block by block without materializing them."""
        grid = self._check(model, n, m)
        for b, start, stop in iter_block_bounds(n, grid.size):
            yield self._block(model, seed, m, b, start, stop)

    def map_blocks(
        self, model: ProcessModel, n: int, m: int, seed: int, fn: Callable[[np.ndarray], T]
    ) -> List[T]:
        """Apply ``fn`` to every simulated block in parallel; results come back in block order."""
        grid = self._check(model, n, m)
        return run_blocks(
            lambda b, start, stop: fn(self._block(model, seed, m, b, start, stop)),
            n,
            grid.size,
            self.settings.jobs,
        )

    def sample_product(self, marginals: List[MarginalSpec], n: int, seed: int) -> PathEnsemble:
        """Draw n sequences whose coordinate t follows ``marginals[t]`` independently."""
        if not marginals:
            raise DomainError("marginals must be non-empty")
        model = ProcessModel(kind=ProcessKind.PRODUCT_SEQUENCE, marginals=list(marginals))
        return self.simulate(model, n, len(marginals), seed)


def brownian_bridge_refine(ens: PathEnsemble, factor: int, seed: int) -> PathEnsemble:
    """
    Refine a Brownian ensemble onto a grid ``factor`` times finer.

    New points inside each interval are drawn sequentially from the exact
    Brownian-bridge law between the known endpoint values, so the refined
    ensemble has the law of Brownian motion sampled on the finer grid and
    agrees with the input on the original points.

    Args:
        ens: Ensemble of (optionally smoothed) Brownian motion on a uniform 1-D grid.
        factor: Refinement factor, at least 1.
        seed: Seed of the bridge stream.

    Returns:
        The refined ensemble.
    """
    if factor < 1:
        raise DomainError(f"factor must be >= 1, got {factor}")
    if ens.model is None or ens.model.kind is not ProcessKind.BROWNIAN_MOTION:
        raise DomainError("bridge refinement needs a Brownian motion ensemble")
    m = ens.m - 1
    if ens.grid.dim != 1 or not ens.grid.same_as(Grid.uniform(m)):
        raise DomainError("bridge refinement needs the uniform grid {0, 1/m, ..., 1}")
    if factor == 1:
        return ens

    fine_m = m * factor
    dt = 1.0 / fine_m
    blocks = []
    for b, start, stop in iter_block_bounds(ens.n, fine_m + 1):
        rng = block_generator(seed, StreamTag.BRIDGE, b)
        coarse = ens.paths[start:stop]
        rows = stop - start
        fine = np.empty((rows, fine_m + 1))
        fine[:, ::factor] = coarse
        right = coarse[:, 1:]
        current = coarse[:, :-1]
        for k in range(1, factor):
            remaining = (factor - k + 1) * dt
            mean = current + (right - current) * dt / remaining
            std = math.sqrt(dt * (remaining - dt) / remaining)
            current = mean + std * rng.standard_normal(current.shape)
            fine[:, k::factor][:, :m] = current
        blocks.append(fine)
    return PathEnsemble(
        grid=Grid.uniform(fine_m),
        paths=np.concatenate(blocks, axis=0),
        model=ens.model,
        seed=ens.seed,
        smoothed=ens.smoothed,
        smoothing=ens.smoothing,
    )
