"""
High-precision Monte Carlo references for population depth, cached on disk.

Each oracle is a fresh ensemble of ``n_ref`` paths, streamed block by block
so only per-block counts are kept. Results are stored as JSON under
``<cache_dir>/oracles/<sha256>.json`` keyed by model, function, subset,
n_ref, grid size and seed; files are created atomically.
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import Settings, get_settings
from ..exceptions import DomainError, ResourceCapError
from ..gridfn.models import GridFunction, IndexSubset
from ..gridfn.operations import check_subset
from ..processes.models import ProcessModel
from ..processes.simulator import ProcessSimulator
from .empirical import constant_counts, count_sides, path_extremes
from .models import DepthEstimate

logger = logging.getLogger(__name__)


def _grid_resolution(model: ProcessModel, h: GridFunction) -> int:
    try:
        return model.resolution(h.grid)
    except ValueError as e:
        raise DomainError(str(e)) from e


def cache_key(payload: Dict[str, Any]) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class OracleCache:
    """JSON files keyed by sha256 of the oracle request."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str) -> Optional[Dict[str, Any]]:
        path = self.path(key)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            logger.warning("ignoring unreadable oracle cache entry %s: %s", path, e)
            return None

    def store(self, key: str, data: Dict[str, Any]) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(data, f)
            os.replace(tmp, self.path(key))
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise


def _check_budget(n_ref: int, points: int, settings: Settings) -> None:
    if n_ref < settings.oracle_min_n:
        raise DomainError(f"oracle needs n_ref >= {settings.oracle_min_n}, got {n_ref}")
    work = float(n_ref) * points
    if work > settings.oracle_max_work:
        raise ResourceCapError(
            f"oracle work {work:.3g} (n_ref x grid points) exceeds the cap {settings.oracle_max_work:.3g}"
        )


def population_depth_oracle(
    model: ProcessModel,
    h: GridFunction,
    n_ref: int,
    seed: int,
    J: Optional[IndexSubset] = None,
    settings: Optional[Settings] = None,
    use_cache: bool = True,
) -> DepthEstimate:
    """
    Reference value of D(h, P) from a fresh ensemble of n_ref paths.

    Args:
        model: Process to sample.
        h: Function on the model's grid; its grid fixes the resolution.
        n_ref: Reference sample size, at least ``settings.oracle_min_n``.
        seed: Seed of the reference ensemble.
        J: Optional subset of grid indices.
        settings: Runtime settings (cache directory, budgets, jobs).
        use_cache: Read and write the on-disk cache.

    Returns:
        DepthEstimate flagged ``oracle=True``.

    Raises:
        DomainError: If n_ref is below the minimum or h does not fit the model grid.
        ResourceCapError: If n_ref x grid points exceeds the work budget.
    """
    settings = settings or get_settings()
    m = _grid_resolution(model, h)
    cols = None
    if J is not None:
        check_subset(J, h.grid)
        cols = J.array
    _check_budget(n_ref, h.grid.size, settings)

    key = cache_key(
        {
            "model": model.descriptor(),
            "h": h.values.tolist(),
            "subset": list(J.indices) if J is not None else None,
            "n_ref": n_ref,
            "m": m,
            "seed": seed,
        }
    )
    cache = OracleCache(settings.cache_dir / "oracles")
    if use_cache:
        cached = cache.load(key)
        if cached is not None:
            logger.debug("oracle cache hit %s", key[:12])
            return DepthEstimate(**cached)

    target = h.values if cols is None else h.values[cols]

    def count(block: np.ndarray) -> tuple:
        return count_sides(block if cols is None else block[:, cols], target)

    logger.info("oracle run: %s n_ref=%d grid=%d", model.kind.value, n_ref, h.grid.size)
    parts = ProcessSimulator(settings).map_blocks(model, n_ref, m, seed, count)
    above, below, both = (int(sum(p[i] for p in parts)) for i in range(3))
    estimate = DepthEstimate.from_counts(
        above,
        below,
        n_ref,
        settings.z,
        count_both=both,
        grid_size=h.grid.size,
        subset=list(J.indices) if J is not None else None,
        seed=seed,
        model=model.descriptor(),
        oracle=True,
    )
    if use_cache:
        cache.store(key, estimate.model_dump(mode="json"))
    return estimate


def constant_depth_oracle(
    model: ProcessModel,
    cs: Sequence[float],
    m: int,
    n_ref: int,
    seed: int,
    subsets: Optional[List[IndexSubset]] = None,
    settings: Optional[Settings] = None,
) -> np.ndarray:
    """
    Reference depths of many constant functions from one streamed ensemble.

    Args:
        model: Process to sample.
        cs: Constants.
        m: Grid resolution.
        n_ref: Reference sample size.
        seed: Seed of the reference ensemble.
        subsets: Optional list of index subsets; one row of depths per subset.
        settings: Runtime settings.

    Returns:
        Array of shape (len(subsets), len(cs)), or (1, len(cs)) over the full grid.
    """
    settings = settings or get_settings()
    grid = model.grid(m)
    _check_budget(n_ref, grid.size, settings)
    col_sets = [None] if subsets is None else [J.array for J in subsets]
    for J in subsets or []:
        check_subset(J, grid)

    cs = np.asarray(cs, dtype=float)

    def counts(block: np.ndarray) -> np.ndarray:
        out = np.empty((len(col_sets), 2, cs.size), dtype=np.int64)
        for i, cols in enumerate(col_sets):
            out[i] = constant_counts(*path_extremes(block, cols), cs)
        return out

    parts = ProcessSimulator(settings).map_blocks(model, n_ref, m, seed, counts)
    total = np.sum(parts, axis=0)
    return np.minimum(total[:, 0], total[:, 1]) / n_ref
