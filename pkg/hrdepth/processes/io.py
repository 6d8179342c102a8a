"""
Ensemble CSV + JSON sidecar.

The CSV has no header line of names: its first row holds the ``t`` values
(two rows, ``t1`` then ``t2``, for sheets) and every following row is one
path. The sidecar ``<file>.json`` records model, seed, n, m and smoothing.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..exceptions import DomainError
from ..gridfn.models import Grid
from ..smoothing.models import SmoothingDensity
from .models import PathEnsemble, ProcessModel

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_ensemble(ens: PathEnsemble, path: PathLike, extra: Optional[Dict[str, Any]] = None) -> None:
    """Write the CSV and its sidecar; ``extra`` entries are added to the sidecar."""
    points = ens.grid.points
    header = points.T  # one row per coordinate
    pd.DataFrame(np.vstack([header, ens.paths])).to_csv(
        path, header=False, index=False, encoding="utf-8", float_format="%.17g"
    )
    meta = {**ens.metadata(), **(extra or {})}
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8")


def read_ensemble(path: PathLike) -> PathEnsemble:
    """Read an ensemble; provenance comes from the sidecar when present."""
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
    dim = int(meta.get("dim", 1))
    data = pd.read_csv(path, header=None, encoding="utf-8", float_precision="round_trip").to_numpy(dtype=float)
    if data.shape[0] <= dim:
        raise DomainError(f"{path}: no path rows")
    try:
        if dim == 1:
            grid = Grid(axes=(data[0],))
        else:
            grid = Grid(axes=(np.unique(data[0]), np.unique(data[1])))
            if not np.array_equal(grid.points.T, data[:2]):
                raise DomainError(f"{path}: header rows must list the lattice in row-major order")
        return PathEnsemble(
            grid=grid,
            paths=data[dim:],
            model=ProcessModel(**meta["model"]) if meta.get("model") else None,
            seed=meta.get("seed"),
            smoothed=bool(meta.get("smoothed", False)),
            smoothing=SmoothingDensity(**meta["smoothing"]) if meta.get("smoothing") else None,
        )
    except ValidationError as e:
        raise DomainError(f"{path}: {e}") from e
