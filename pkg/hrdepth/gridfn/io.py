"""
CSV readers and writers for grid functions.

Format: header ``t,value`` (1-D) or ``t1,t2,value`` (2-D), one row per grid
point, UTF-8, '.' as decimal separator. Floats are written with round-trip
precision so reading a file back reproduces the values exactly.
"""

from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..exceptions import DomainError
from .models import Grid, GridFunction

PathLike = Union[str, Path]


def write_grid_function(h: GridFunction, path: PathLike) -> None:
    pts = h.grid.points
    if h.grid.dim == 1:
        df = pd.DataFrame({"t": pts[:, 0], "value": h.values})
    else:
        df = pd.DataFrame({"t1": pts[:, 0], "t2": pts[:, 1], "value": h.values})
    df.to_csv(path, index=False, encoding="utf-8", float_format="%.17g")


def read_grid_function(path: PathLike) -> GridFunction:
    df = pd.read_csv(path, encoding="utf-8", float_precision="round_trip")
    columns = list(df.columns)
    try:
        if columns == ["t", "value"]:
            grid = Grid(axes=(df["t"].to_numpy(),))
        elif columns == ["t1", "t2", "value"]:
            t1 = np.unique(df["t1"].to_numpy())
            t2 = np.unique(df["t2"].to_numpy())
            grid = Grid(axes=(t1, t2))
            if not np.array_equal(grid.points, df[["t1", "t2"]].to_numpy()):
                raise DomainError(f"{path}: 2-D rows must list the lattice in row-major order")
        else:
            raise DomainError(f"{path}: expected header 't,value' or 't1,t2,value', got {columns}")
        return GridFunction(grid=grid, values=df["value"].to_numpy())
    except ValidationError as e:
        raise DomainError(f"{path}: {e}") from e
