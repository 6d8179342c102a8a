"""
Experiment harness: zero-depth trends, uniform consistency, rates and
tails, the limit law at ties, subset consistency, the C2 gap and the
large-norm tail.

Every replication draws from its own master seed ``derive_seed(seed, n, rep)``;
replications run in a thread pool and are collected in index order, so a
report is reproducible from (config, seed) at any job count.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from scipy import stats

from ..config import Settings, get_settings
from ..exceptions import DomainError
from ..gridfn.models import FamilyKind, FamilySpec, Grid, GridFunction, IndexSubset
from ..gridfn.nets import epsilon_net, sample_family
from ..gridfn.operations import check_same_grid
from ..depth.empirical import constant_depths, count_sides, empirical_depth, empirical_depth_subset
from ..depth.exact import sparre_andersen_exact
from ..depth.oracle import constant_depth_oracle, population_depth_oracle
from ..processes.models import MarginalKind, PathEnsemble, ProcessKind, ProcessModel
from ..processes.simulator import ProcessSimulator
from ..processes.streams import derive_seed
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

logger = logging.getLogger(__name__)

T = TypeVar("T")

_ORACLE_STREAM = 0x0AC1E
_SUBSET_STREAM = 0x5B5E7
_TAIL_STREAM = 0x7A11

DEFAULT_N_REF = 1_000_000
LIMIT_LAW_N_REF = 10_000_000
TIE_SE = 3.0


def _is_constant(h: GridFunction) -> bool:
    return bool(np.all(h.values == h.values[0]))


def _constant_paths_offsets(model: ProcessModel) -> Optional[np.ndarray]:
    """a_t when every path is a_t + Z, i.e. a smoothed product of point masses."""
    if model.kind is not ProcessKind.PRODUCT_SEQUENCE or model.smoothing is None:
        return None
    if not all(s.kind is MarginalKind.POINT_MASS for s in model.marginals):
        return None
    return np.array([s.x for s in model.marginals])


def _row(n: int, errors: np.ndarray, statistic: Optional[np.ndarray] = None, label: str = "sup_error") -> NRow:
    values = errors if statistic is None else statistic
    q50, q95, q99 = np.quantile(values, [0.5, 0.95, 0.99])
    return NRow(
        n=n,
        reps=int(errors.size),
        sup_error=float(np.median(errors)),
        q50=float(q50),
        q95=float(q95),
        q99=float(q99),
        statistic=label,
    )


class ExperimentRunner:
    """Runs the desk-scale experiments and returns ExperimentReports."""

    def __init__(self, settings: Optional[Settings] = None):
        """
        Args:
            settings: Runtime settings; ``jobs`` sets the replication pool size.
        """
        self.settings = settings or get_settings()
        self.simulator = ProcessSimulator(self.settings)
        # replications simulate inline; the pool runs across replications
        self._rep_settings = self.settings.model_copy(update={"jobs": 1})
        self._rep_simulator = ProcessSimulator(self._rep_settings)

    def _map_reps(self, fn: Callable[[int], T], reps: int) -> List[T]:
        if self.settings.jobs <= 1 or reps == 1:
            return [fn(r) for r in range(reps)]
        with ThreadPoolExecutor(max_workers=self.settings.jobs) as pool:
            return list(pool.map(fn, range(reps)))

    def _resolution(self, model: ProcessModel, grid: Grid) -> int:
        try:
            return model.resolution(grid)
        except ValueError as e:
            raise DomainError(str(e)) from e

    def _centers(self, family: FamilySpec, eps: Optional[float]) -> List[GridFunction]:
        if family.kind is FamilyKind.FINITE_LIST and eps is None:
            return list(family.functions)
        if eps is None:
            raise DomainError(f"a {family.kind.value} family needs eps")
        return epsilon_net(family, eps, self.settings).centers

    def _truth(
        self,
        model: ProcessModel,
        centers: List[GridFunction],
        m: int,
        n_ref: int,
        seed: int,
        subsets: Optional[List[IndexSubset]] = None,
    ) -> Tuple[np.ndarray, str]:
        """Population depths, shape (len(subsets) or 1, len(centers)), and their source."""
        col_sets = [None] if subsets is None else [J.array for J in subsets]
        offsets = _constant_paths_offsets(model)
        if offsets is not None:
            dist = model.smoothing.distribution
            out = np.empty((len(col_sets), len(centers)))
            for i, cols in enumerate(col_sets):
                for j, h in enumerate(centers):
                    gap = h.values - offsets if cols is None else h.values[cols] - offsets[cols]
                    out[i, j] = min(float(dist.sf(gap.max())), float(dist.cdf(gap.min())))
            return out, "analytic"
        oracle_seed = derive_seed(seed, _ORACLE_STREAM)
        if all(_is_constant(h) for h in centers):
            cs = [float(h.values[0]) for h in centers]
            return (
                constant_depth_oracle(model, cs, m, n_ref, oracle_seed, subsets, self.settings),
                "monte-carlo",
            )
        out = np.empty((len(col_sets), len(centers)))
        for i, J in enumerate(subsets or [None]):
            for j, h in enumerate(centers):
                out[i, j] = population_depth_oracle(model, h, n_ref, oracle_seed, J, self.settings).value
        return out, "monte-carlo"

    def _empirical(
        self, ens: PathEnsemble, centers: List[GridFunction], subsets: Optional[List[IndexSubset]] = None
    ) -> np.ndarray:
        if all(_is_constant(h) for h in centers):
            cs = [float(h.values[0]) for h in centers]
            return np.vstack([constant_depths(ens, cs, J) for J in subsets or [None]])
        if subsets is None:
            return np.array([[empirical_depth(ens, h, self._rep_settings).value for h in centers]])
        return np.array(
            [[empirical_depth_subset(ens, h, J, self._rep_settings).value for h in centers] for J in subsets]
        )

    def zero_depth_trend(
        self, model: ProcessModel, h: GridFunction, m_schedule: Sequence[int], n: int, seed: int
    ) -> ExperimentReport:
        """
        Depth of h on nested grids from a single simulation at the finest resolution.

        Args:
            model: Process (smoothed or not); not a product sequence.
            h: Function on the finest grid ``model.grid(max(m_schedule))``.
            m_schedule: Resolutions; each must divide the largest.
            n: Paths.
            seed: Master seed.

        Returns:
            ExperimentReport with one trend row per m, plus the exact value
            C(2m, m)/4^m where it applies.
        """
        started = time.perf_counter()
        if model.kind is ProcessKind.PRODUCT_SEQUENCE:
            raise DomainError("zero-depth trend needs a process indexed by [0, 1]")
        schedule = sorted(set(int(m) for m in m_schedule))
        m_max = schedule[-1]
        fine = model.grid(m_max)
        check_same_grid(fine, h.grid)
        picks = []
        for m in schedule:
            if m_max % m:
                raise DomainError(f"grid m={m} is not nested in m={m_max}")
            picks.append(fine.subsample(m_max // m)[1])

        def count(block: np.ndarray) -> list:
            return [count_sides(block[:, idx], h.values[idx]) for idx in picks]

        parts = self.simulator.map_blocks(model, n, m_max, seed, count)
        sparre = (
            model.has_zero_continuum_depth
            and model.kind is not ProcessKind.BROWNIAN_SHEET
            and bool(np.all(h.values == 0))
        )
        trend = []
        for k, m in enumerate(schedule):
            above = sum(p[k][0] for p in parts)
            below = sum(p[k][1] for p in parts)
            depth = min(above, below) / n
            trend.append(
                TrendRow(
                    m=m,
                    depth=depth,
                    standard_error=math.sqrt(depth * (1 - depth) / n),
                    count_above=above,
                    count_below=below,
                    exact=sparre_andersen_exact(m) if sparre else None,
                )
            )
            logger.info("zero-depth trend m=%d: depth=%.5f", m, depth)
        if sparre:
            oracle = {"source": "sparre-andersen"}
        elif model.kind is ProcessKind.BROWNIAN_SHEET:
            oracle = {"source": "none", "reason": "no closed-form grid depth for the Brownian sheet"}
        else:
            oracle = {"source": "none", "reason": "no closed-form grid depth for this model and h"}
        return ExperimentReport(
            kind=ExperimentKind.ZERO_TREND,
            model=model.descriptor(),
            seed=seed,
            trend=trend,
            oracle=oracle,
            wall_clock=time.perf_counter() - started,
        )

    def _sup_errors(
        self,
        model: ProcessModel,
        centers: List[GridFunction],
        truth: np.ndarray,
        m: int,
        n: int,
        reps: int,
        seed: int,
        subsets: Optional[List[IndexSubset]] = None,
    ) -> np.ndarray:
        def rep(r: int) -> float:
            ens = self._rep_simulator.simulate(model, n, m, derive_seed(seed, n, r))
            return float(np.max(np.abs(self._empirical(ens, centers, subsets) - truth)))

        return np.array(self._map_reps(rep, reps))

    def consistency_experiment(
        self,
        model: ProcessModel,
        family: FamilySpec,
        n_schedule: Sequence[int],
        eps: Optional[float],
        reps: int,
        seed: int,
        n_ref: int = DEFAULT_N_REF,
    ) -> ExperimentReport:
        """
        sup over an eps-net of |D_n(h) - D(h)| for each n.

        Args:
            model: Process; its grid must be the family's grid.
            family: Function family.
            n_schedule: Sample sizes.
            eps: Net radius (optional for finite lists).
            reps: Replications per n.
            seed: Master seed.
            n_ref: Oracle sample size when no closed form exists.

        Returns:
            ExperimentReport with one row per n; ``modulus_correction`` holds
            2·eps·∫|f'| for smoothed models.
        """
        started = time.perf_counter()
        m = self._resolution(model, family.grid)
        centers = self._centers(family, eps)
        truth, source = self._truth(model, centers, m, n_ref, seed)
        rows, replicates = [], []
        for n in sorted(set(n_schedule)):
            errors = self._sup_errors(model, centers, truth, m, n, reps, seed)
            rows.append(_row(n, errors))
            replicates.extend({"n": n, "rep": r, "sup_error": e} for r, e in enumerate(errors.tolist()))
            logger.info("consistency n=%d: median sup error %.4g", n, rows[-1].sup_error)
        modulus = None
        if model.smoothing is not None and eps is not None:
            modulus = 2.0 * eps * model.smoothing.grad_l1
        return ExperimentReport(
            kind=ExperimentKind.CONSISTENCY,
            model=model.descriptor(),
            seed=seed,
            rows=rows,
            modulus_correction=modulus,
            oracle={"source": source, "n_ref": n_ref, "centers": len(centers)},
            replicates=replicates,
            wall_clock=time.perf_counter() - started,
        )

    def rate_experiment(
        self,
        model: ProcessModel,
        family: FamilySpec,
        n_schedule: Sequence[int],
        reps: int,
        seed: int,
        r_grid: Optional[Sequence[float]] = None,
        n_ref: int = DEFAULT_N_REF,
    ) -> ExperimentReport:
        """
        Distribution of S = sup_{h in E} √n|D_n(h) - D(h)| across n, and its tail.

        The tail P(S >= r) is pooled over n; log P(S >= r) is regressed on r²
        and ``certified_alpha`` is the largest alpha with P(S >= r) <= 4·exp(-alpha r²)
        on the r grid. Degenerate setups (zero continuum depth or all oracle
        depths 0) are flagged and not fitted.
        """
        started = time.perf_counter()
        if family.kind is not FamilyKind.FINITE_LIST:
            raise DomainError("rate experiment needs a finite family")
        m = self._resolution(model, family.grid)
        centers = list(family.functions)
        truth, source = self._truth(model, centers, m, n_ref, seed)
        degenerate = model.has_zero_continuum_depth or bool(np.all(truth <= 1e-12))
        if degenerate:
            logger.warning("rate experiment is degenerate: population depths vanish")

        rows, replicates, pooled = [], [], []
        for n in sorted(set(n_schedule)):
            errors = self._sup_errors(model, centers, truth, m, n, reps, seed)
            scaled = math.sqrt(n) * errors
            pooled.append(scaled)
            rows.append(_row(n, errors, scaled, "sqrt_n_sup_error"))
            replicates.extend(
                {"n": n, "rep": r, "sup_error": e, "scaled": s}
                for r, (e, s) in enumerate(zip(errors.tolist(), scaled.tolist()))
            )
            logger.info("rate n=%d: q95 of sqrt(n) sup error %.4g", n, rows[-1].q95)

        S = np.concatenate(pooled)
        if r_grid is None:
            lo, hi = np.quantile(S, [0.5, 0.99])
            r_grid = np.linspace(lo, hi, 8)
        r_arr = np.asarray(sorted(r_grid), dtype=float)
        exceed = np.array([float(np.mean(S >= r)) for r in r_arr])
        tail = [TailRow(r=float(r), exceedance=float(e)) for r, e in zip(r_arr, exceed)]

        fitted = r_squared = certified = None
        usable = (exceed > 0) & (r_arr > 0)
        if not degenerate and usable.sum() >= 4 and np.ptp(r_arr[usable]) > 0:
            fit = stats.linregress(r_arr[usable] ** 2, np.log(exceed[usable]))
            fitted = -float(fit.slope)
            r_squared = float(fit.rvalue**2)
            certified = float(np.min(np.log(4.0 / exceed[usable]) / r_arr[usable] ** 2))
        return ExperimentReport(
            kind=ExperimentKind.RATE,
            model=model.descriptor(),
            seed=seed,
            rows=rows,
            tail=tail,
            fitted_alpha=fitted,
            r_squared=r_squared,
            certified_alpha=certified,
            degenerate=degenerate,
            oracle={"source": source, "n_ref": n_ref, "depths": truth[0].tolist()},
            replicates=replicates,
            wall_clock=time.perf_counter() - started,
        )

    def limit_law_demo(
        self,
        model: ProcessModel,
        h: GridFunction,
        n: int,
        reps: int,
        seed: int,
        n_ref: int = LIMIT_LAW_N_REF,
    ) -> ExperimentReport:
        """
        Sample √n(D_n(h) - D(h)) and compare it with its Gaussian limit.

        With F = P(X ⪰ h) and G = P(X ⪯ h) from the oracle, h is a tie when
        |F - G| is within 3 standard errors. The tie limit is the minimum of
        two centered Gaussians with variances F(1-F), G(1-G) and covariance
        P(X ⪰ h, X ⪯ h) - F·G; otherwise it is Normal(0, p(1-p)). A tie that
        is not forced by symmetry (X and -X equal in law, h = -h) is flagged
        ambiguous.
        """
        started = time.perf_counter()
        m = self._resolution(model, h.grid)
        oracle = population_depth_oracle(model, h, n_ref, derive_seed(seed, _ORACLE_STREAM), settings=self.settings)
        F, G, FG = oracle.above_fraction, oracle.below_fraction, oracle.both_fraction
        exact_tie = model.is_symmetric and bool(np.array_equal(h.values, -h.values))
        if exact_tie:
            F = G = 0.5 * (F + G)
        v = max(F * (1 - F) + G * (1 - G) - 2.0 * (FG - F * G), 0.0)
        tie = exact_tie or abs(F - G) <= TIE_SE * math.sqrt(v / n_ref)
        ambiguous = tie and not exact_tie
        if ambiguous:
            logger.warning("tie classification is ambiguous: |F-G|=%.3g", abs(F - G))
        p = min(F, G)
        if tie:
            predicted_mean = -math.sqrt(v / (2.0 * math.pi))
            predicted_var = 0.5 * (F * (1 - F) + G * (1 - G)) - v / (2.0 * math.pi)
        else:
            predicted_mean, predicted_var = 0.0, p * (1 - p)

        def rep(r: int) -> float:
            ens = self._rep_simulator.simulate(model, n, m, derive_seed(seed, n, r))
            return math.sqrt(n) * (empirical_depth(ens, h, self._rep_settings).value - p)

        deviations = np.array(self._map_reps(rep, reps))
        mean = float(np.mean(deviations))
        variance = float(np.var(deviations, ddof=1)) if reps > 1 else 0.0
        mean_se = math.sqrt(variance / reps)
        z = (mean - predicted_mean) / mean_se if mean_se > 0 else 0.0
        summary = LimitLawSummary(
            tie=tie,
            ambiguous=ambiguous,
            F=F,
            G=G,
            FG=FG,
            depth=p,
            mean=mean,
            variance=variance,
            mean_se=mean_se,
            predicted_mean=predicted_mean,
            predicted_variance=max(predicted_var, 0.0),
            z_score=z,
        )
        logger.info("limit law: mean %.4f vs predicted %.4f (z=%.2f)", mean, predicted_mean, z)
        return ExperimentReport(
            kind=ExperimentKind.LIMIT_LAW,
            model=model.descriptor(),
            seed=seed,
            rows=[_row(n, np.abs(deviations) / math.sqrt(n), deviations, "sqrt_n_deviation")],
            limit_law=summary,
            oracle={"source": "monte-carlo", "n_ref": n_ref, "exact_tie": exact_tie},
            replicates=[{"rep": r, "deviation": d} for r, d in enumerate(deviations.tolist())],
            wall_clock=time.perf_counter() - started,
        )

    def sample_subsets(self, grid: Grid, r: int, count: int, seed: int) -> List[IndexSubset]:
        """``count`` random subsets with 1 <= |J| <= r."""
        if r < 1 or r > grid.size:
            raise DomainError(f"r must lie in 1..{grid.size}, got {r}")
        rng = np.random.default_rng(derive_seed(seed, _SUBSET_STREAM))
        sizes = rng.integers(1, r + 1, count)
        return [IndexSubset(indices=rng.choice(grid.size, k, replace=False)) for k in sizes]

    def subset_consistency_experiment(
        self,
        model: ProcessModel,
        family: FamilySpec,
        r: int,
        n_schedule: Sequence[int],
        reps: int,
        seed: int,
        eps: Optional[float] = None,
        n_subsets: int = 200,
        n_ref: int = DEFAULT_N_REF,
    ) -> ExperimentReport:
        """
        sup over (eps-net) x (sampled subsets J, |J| <= r) of |D_{n,J}(h) - D_J(h)|.

        The sampled supremum is a lower bound on the supremum over all subsets.
        """
        started = time.perf_counter()
        m = self._resolution(model, family.grid)
        centers = self._centers(family, eps)
        subsets = self.sample_subsets(family.grid, r, n_subsets, seed)
        truth, source = self._truth(model, centers, m, n_ref, seed, subsets)
        rows, replicates = [], []
        for n in sorted(set(n_schedule)):
            errors = self._sup_errors(model, centers, truth, m, n, reps, seed, subsets)
            rows.append(_row(n, errors))
            replicates.extend({"n": n, "rep": k, "sup_error": e} for k, e in enumerate(errors.tolist()))
            logger.info("subset consistency n=%d: median sup error %.4g", n, rows[-1].sup_error)
        return ExperimentReport(
            kind=ExperimentKind.SUBSET,
            model=model.descriptor(),
            seed=seed,
            rows=rows,
            oracle={"source": source, "n_ref": n_ref, "subsets": n_subsets, "r": r},
            replicates=replicates,
            wall_clock=time.perf_counter() - started,
        )

    def c2_gap_demo(
        self, model: ProcessModel, h1: GridFunction, h2: GridFunction, n: int, seed: int
    ) -> GapEstimate:
        """Estimate P(h1 ⪯ X) - P(h2 ⪯ X) for h1 ⪯ h2 from one ensemble."""
        check_same_grid(h1.grid, h2.grid)
        if np.any(h1.values > h2.values):
            raise DomainError("c2 gap needs h1 <= h2 everywhere")
        m = self._resolution(model, h1.grid)
        ens = self.simulator.simulate(model, n, m, seed)
        p1 = float(np.mean(np.all(ens.paths >= h1.values[None, :], axis=1)))
        p2 = float(np.mean(np.all(ens.paths >= h2.values[None, :], axis=1)))
        gap = p1 - p2
        se = math.sqrt(gap * (1 - gap) / n)
        return GapEstimate(gap=gap, p1=p1, p2=p2, n=n, standard_error=se, ci_half_width=self.settings.z * se)

    def norm_tail_experiment(
        self,
        model: ProcessModel,
        r_grid: Sequence[float],
        n: int,
        m: int,
        seed: int,
        functions_per_r: int = 20,
    ) -> ExperimentReport:
        """
        Largest empirical depth among functions of sup norm r, against 2·P_n(||X|| >= r).

        Sampled functions are the constants ±r and, on 1-D grids, Lipschitz
        members rescaled to norm r.
        """
        started = time.perf_counter()
        ens = self.simulator.simulate(model, n, m, seed)
        grid = ens.grid
        norms = np.max(np.abs(ens.paths), axis=1)
        rows = []
        for i, r in enumerate(sorted(float(x) for x in r_grid)):
            if r <= 0:
                raise DomainError("norm-tail radii must be positive")
            hs = [GridFunction.constant(grid, r), GridFunction.constant(grid, -r)]
            if grid.dim == 1 and functions_per_r > 0:
                family = FamilySpec(kind=FamilyKind.LIPSCHITZ_BALL, grid=grid, radius=r, lipschitz=4.0 * r)
                for member in sample_family(family, functions_per_r, derive_seed(seed, _TAIL_STREAM, i)):
                    peak = float(np.max(np.abs(member.values)))
                    if peak > 0:
                        hs.append(GridFunction(grid=grid, values=member.values * (r / peak)))
            depth = max(empirical_depth(ens, h, self.settings).value for h in hs)
            bound = 2.0 * float(np.mean(norms >= r))
            rows.append(NormTailRow(r=r, max_depth=depth, bound=bound, functions=len(hs)))
        return ExperimentReport(
            kind=ExperimentKind.NORM_TAIL,
            model=model.descriptor(),
            seed=seed,
            norm_tail=rows,
            wall_clock=time.perf_counter() - started,
        )
