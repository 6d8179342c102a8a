"""
Runtime settings for hrdepth.

Values come from explicit arguments first, then from ``HRDEPTH_*``
environment variables (a ``.env`` file in the working directory is loaded
automatically), then from the defaults below.
"""

import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .exceptions import ConfigError

_ENV_PREFIX = "HRDEPTH_"


def _default_jobs() -> int:
    return os.cpu_count() or 1


class Settings(BaseModel):
    """Tunables shared by every hrdepth component."""

    jobs: int = Field(default_factory=_default_jobs, ge=1)
    cache_dir: Path = Field(default_factory=lambda: Path.home() / ".cache" / "hrdepth")
    z: float = Field(1.96, gt=0)
    sheet_max_points: int = Field(500_000_000, ge=1)
    oracle_min_n: int = Field(100_000, ge=1)
    oracle_max_work: float = Field(1e10, gt=0)
    net_max_centers: int = Field(100_000, ge=1)
    divergence_ratio: float = Field(0.9, gt=0)
    log_level: str = "WARNING"

    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def from_env(cls, **overrides: Any) -> "Settings":
        """
        Build settings from the environment.

        Args:
            **overrides: Explicit values; ``None`` entries are ignored so that
                         CLI flags left unset fall through to the environment.

        Returns:
            A validated Settings instance.
        """
        load_dotenv()
        readers: Dict[str, Callable[[str], Any]] = {
            "jobs": int,
            "cache_dir": Path,
            "z": float,
            "sheet_max_points": int,
            "oracle_min_n": int,
            "oracle_max_work": float,
            "net_max_centers": int,
            "divergence_ratio": float,
            "log_level": str.upper,
        }
        values: Dict[str, Any] = {}
        for name, parse in readers.items():
            raw = os.getenv(_ENV_PREFIX + name.upper())
            if raw:
                try:
                    values[name] = parse(raw)
                except ValueError as e:
                    raise ConfigError(f"{_ENV_PREFIX}{name.upper()}={raw!r} is not valid: {e}") from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid settings: {e}") from e


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, read from the environment on first use."""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings
