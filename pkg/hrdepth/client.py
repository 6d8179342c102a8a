"""
Unified client for the hrdepth package.
"""

import logging
import time
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import ValidationError

from . import models
from .analysis.runner import DEFAULT_N_REF, LIMIT_LAW_N_REF, ExperimentRunner
from .config import Settings
from .depth.empirical import empirical_depth, empirical_depth_subset, empirical_increment_depth
from .depth.exact import exact_product_depth, nasc_verdict
from .depth.oracle import population_depth_oracle
from .exceptions import DomainError
from .processes.simulator import ProcessSimulator
from .smoothing.operations import smooth_ensemble

logger = logging.getLogger(__name__)


class DepthLabClient:
    """
    A unified client for simulating processes, estimating half-region depths
    and running the experiment suite.
    """

    def __init__(
        self,
        settings: Optional[Settings] = None,
        jobs: Optional[int] = None,
        cache_dir: Optional[Union[str, Path]] = None,
    ):
        """
        Initializes the DepthLabClient.

        Args:
            settings: Base settings; read from the environment when omitted.
            jobs: Worker count, overriding ``settings.jobs`` and HRDEPTH_JOBS.
            cache_dir: Oracle cache directory, overriding HRDEPTH_CACHE_DIR.
        """
        if settings is None:
            settings = Settings.from_env(jobs=jobs, cache_dir=cache_dir)
        else:
            update = {k: v for k, v in (("jobs", jobs), ("cache_dir", cache_dir)) if v is not None}
            if "cache_dir" in update:
                update["cache_dir"] = Path(update["cache_dir"])
            settings = settings.model_copy(update=update)
        self.settings = settings
        self.simulator = ProcessSimulator(settings)
        self.runner = ExperimentRunner(settings)

    def simulate(self, model: models.ProcessModel, n: int, m: int, seed: int) -> models.PathEnsemble:
        return self.simulator.simulate(model, n, m, seed)

    def sample_product(self, marginals: List[models.MarginalSpec], n: int, seed: int) -> models.PathEnsemble:
        return self.simulator.sample_product(marginals, n, seed)

    def smooth(
        self, ens: models.PathEnsemble, density: models.SmoothingDensity, seed: int
    ) -> models.PathEnsemble:
        return smooth_ensemble(ens, density, seed)

    def depth(self, ens: models.PathEnsemble, h: models.GridFunction) -> models.DepthEstimate:
        return empirical_depth(ens, h, self.settings)

    def depth_subset(
        self, ens: models.PathEnsemble, h: models.GridFunction, J: models.IndexSubset
    ) -> models.DepthEstimate:
        return empirical_depth_subset(ens, h, J, self.settings)

    def increment_depth(
        self, ens: models.PathEnsemble, h: models.GridFunction, intervals: Sequence[Sequence[int]]
    ) -> models.DepthEstimate:
        return empirical_increment_depth(ens, h, intervals, self.settings)

    def exact(self, marginals: List[models.MarginalSpec], a: List[float]) -> float:
        return exact_product_depth(marginals, a)

    def verdict(
        self, marginals: List[models.MarginalSpec], a: List[float], tail_model: models.TailModel
    ) -> models.ZeroDepthVerdict:
        return nasc_verdict(marginals, a, tail_model)

    def oracle(
        self,
        model: models.ProcessModel,
        h: models.GridFunction,
        n_ref: int,
        seed: int,
        J: Optional[models.IndexSubset] = None,
    ) -> models.DepthEstimate:
        return population_depth_oracle(model, h, n_ref, seed, J=J, settings=self.settings)

    def run_experiment(
        self, kind: Union[str, models.ExperimentKind], config: models.ExperimentConfig
    ) -> models.ExperimentReport:
        """
        Run one experiment of the suite.

        Args:
            kind: Experiment kind (``zero-trend``, ``consistency``, ``rate``,
                  ``limit-law``, ``subset``, ``c2-gap`` or ``norm-tail``).
            config: Model, functions, schedules and seed.

        Returns:
            The experiment report. A c2-gap estimate is wrapped in a report
            with its ``gap`` field set.

        Raises:
            DomainError: If the config lacks a setting the experiment needs.
        """
        try:
            kind = models.ExperimentKind(kind)
        except ValueError as e:
            raise DomainError(f"unknown experiment kind {kind!r}") from e
        logger.info("running %s experiment (seed %d)", kind.value, config.seed)
        try:
            return self._dispatch(kind, config)
        except DomainError:
            raise
        except (ValueError, ValidationError) as e:
            raise DomainError(str(e)) from e

    def _dispatch(self, kind: models.ExperimentKind, c: models.ExperimentConfig) -> models.ExperimentReport:
        model = c.model
        n_ref = c.n_ref or DEFAULT_N_REF
        if kind is models.ExperimentKind.ZERO_TREND:
            c.need("m_schedule", "n")
            grid = model.grid(max(c.m_schedule))
            h = c.h.build(grid) if c.h else models.GridFunction.constant(grid, 0.0)
            return self.runner.zero_depth_trend(model, h, c.m_schedule, c.n, c.seed)
        if kind is models.ExperimentKind.CONSISTENCY:
            c.need("family", "m", "n_schedule")
            family = c.family.build(model.grid(c.m))
            return self.runner.consistency_experiment(model, family, c.n_schedule, c.eps, c.reps, c.seed, n_ref)
        if kind is models.ExperimentKind.RATE:
            c.need("family", "m", "n_schedule")
            family = c.family.build(model.grid(c.m))
            return self.runner.rate_experiment(model, family, c.n_schedule, c.reps, c.seed, c.r_grid, n_ref)
        if kind is models.ExperimentKind.LIMIT_LAW:
            c.need("m", "n")
            grid = model.grid(c.m)
            h = c.h.build(grid) if c.h else models.GridFunction.constant(grid, 0.0)
            return self.runner.limit_law_demo(model, h, c.n, c.reps, c.seed, c.n_ref or LIMIT_LAW_N_REF)
        if kind is models.ExperimentKind.SUBSET:
            c.need("family", "m", "n_schedule", "r")
            family = c.family.build(model.grid(c.m))
            return self.runner.subset_consistency_experiment(
                model, family, c.r, c.n_schedule, c.reps, c.seed, c.eps, c.n_subsets, n_ref
            )
        if kind is models.ExperimentKind.C2_GAP:
            c.need("h", "h2", "m", "n")
            grid = model.grid(c.m)
            started = time.perf_counter()
            gap = self.runner.c2_gap_demo(model, c.h.build(grid), c.h2.build(grid), c.n, c.seed)
            return models.ExperimentReport(
                kind=kind,
                model=model.descriptor(),
                seed=c.seed,
                gap=gap,
                wall_clock=time.perf_counter() - started,
            )
        c.need("r_grid", "m", "n")
        return self.runner.norm_tail_experiment(model, c.r_grid, c.n, c.m, c.seed)
