import json
import math
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError

from hrdepth.config import Settings
from hrdepth.depth import (
    DepthEstimate,
    TailModel,
    VerdictKind,
    check_intervals,
    count_sides,
    constant_depth_oracle,
    constant_depths,
    difference_criterion,
    empirical_depth,
    empirical_depth_subset,
    empirical_increment_depth,
    exact_product_depth,
    min_min_check,
    nasc_verdict,
    population_depth_oracle,
    sparre_andersen_exact,
)
from hrdepth.exceptions import DomainError, ResourceCapError
from hrdepth.gridfn import Grid, GridFunction, IndexSubset
from hrdepth.processes import (
    MarginalSpec,
    PathEnsemble,
    ProcessKind,
    ProcessModel,
    ProcessSimulator,
    brownian_bridge_refine,
)
from hrdepth.smoothing import DensityFamily, SmoothingDensity

BM = ProcessModel(kind=ProcessKind.BROWNIAN_MOTION)
GAUSSIAN = SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=1.0)


@pytest.fixture
def settings(tmp_path):
    return Settings(jobs=1, cache_dir=tmp_path, oracle_min_n=1_000)


@pytest.fixture
def simulator(settings):
    return ProcessSimulator(settings)


@pytest.fixture
def constant_paths():
    """Paths identically 1, 2 and -1 on a 5-point grid."""
    grid = Grid.uniform(4)
    return PathEnsemble(grid=grid, paths=np.outer([1.0, 2.0, -1.0], np.ones(grid.size)))


def zero(grid):
    return GridFunction.constant(grid, 0.0)


def test_constant_paths_fixture(constant_paths, settings):
    estimate = empirical_depth(constant_paths, zero(constant_paths.grid), settings)
    assert (estimate.count_above, estimate.count_below) == (2, 1)
    assert estimate.value == pytest.approx(1 / 3)
    assert estimate.n == 3 and estimate.grid_size == 5


def test_all_paths_equal_h(settings):
    grid = Grid.uniform(3)
    h = GridFunction(grid=grid, values=[0.0, 0.3, -0.2, 1.0])
    ens = PathEnsemble(grid=grid, paths=np.tile(h.values, (4, 1)))
    estimate = empirical_depth(ens, h, settings)
    assert estimate.value == 1.0
    assert estimate.count_both == 4


def test_depth_rejects_other_grid(constant_paths, settings):
    with pytest.raises(DomainError, match="grid mismatch"):
        empirical_depth(constant_paths, zero(Grid.uniform(3)), settings)


def test_depth_ignores_job_count(simulator, tmp_path):
    ens = simulator.simulate(BM, 30_000, 16, seed=4)
    h = GridFunction.from_callable(ens.grid, lambda t: 0.3 * t - 0.1)
    serial = empirical_depth(ens, h, Settings(jobs=1, cache_dir=tmp_path))
    parallel = empirical_depth(ens, h, Settings(jobs=4, cache_dir=tmp_path))
    assert serial == parallel


def test_estimate_validates_value():
    with pytest.raises(ValidationError, match="min\\(count_above, count_below\\)"):
        DepthEstimate(value=0.5, count_above=1, count_below=2, n=4, ci_half_width=0.1, grid_size=3)


def test_ci_uses_smaller_proportion():
    estimate = DepthEstimate.from_counts(30, 10, 100, 1.96, grid_size=2)
    assert estimate.ci_half_width == pytest.approx(1.96 * math.sqrt(0.1 * 0.9 / 100))


def test_subset_full_grid_equals_plain_depth(simulator, settings):
    ens = simulator.simulate(BM, 2000, 8, seed=2)
    h = zero(ens.grid)
    full = empirical_depth_subset(ens, h, IndexSubset.full(ens.grid), settings)
    plain = empirical_depth(ens, h, settings)
    assert full.value == plain.value
    assert full.subset == list(range(ens.grid.size))


def test_subset_monotonicity(simulator, settings):
    """Enlarging J can only lower the depth."""
    ens = simulator.simulate(BM.smoothed(GAUSSIAN), 500, 12, seed=8)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        size = int(rng.integers(1, ens.grid.size))
        small = rng.choice(ens.grid.size, size, replace=False)
        extra = rng.choice(np.setdiff1d(np.arange(ens.grid.size), small), int(rng.integers(1, ens.grid.size - size + 1)), replace=False)
        h = GridFunction(grid=ens.grid, values=rng.normal(0, 0.5, ens.grid.size))
        J = IndexSubset(indices=small)
        J_big = IndexSubset(indices=np.concatenate([small, extra]))
        assert J.issubset(J_big)
        assert empirical_depth_subset(ens, h, J_big, settings).value <= empirical_depth_subset(ens, h, J, settings).value


def test_single_point_subset_of_smoothed_bm(simulator, settings):
    ens = simulator.simulate(BM.smoothed(GAUSSIAN), 20_000, 8, seed=3)
    estimate = empirical_depth_subset(ens, zero(ens.grid), IndexSubset(indices=[4]), settings)
    assert estimate.value == pytest.approx(0.5, abs=0.02)


def test_increment_depth_of_constant_paths(constant_paths, settings):
    estimate = empirical_increment_depth(constant_paths, zero(constant_paths.grid), [[0, 2], [2, 4]], settings)
    assert estimate.value == 1.0
    assert estimate.intervals == [[0, 2], [2, 4]]


def test_increment_depth_single_interval(simulator, settings):
    ens = simulator.simulate(BM, 20_000, 8, seed=6)
    estimate = empirical_increment_depth(ens, zero(ens.grid), [[2, 5]], settings)
    assert estimate.value == pytest.approx(0.5, abs=0.02)


def test_increment_depth_four_intervals(simulator, settings):
    ens = simulator.simulate(BM, 50_000, 8, seed=10)
    estimate = empirical_increment_depth(ens, zero(ens.grid), [[0, 2], [2, 4], [4, 6], [6, 8]], settings)
    assert abs(estimate.value - 1 / 16) <= 3 * math.sqrt((1 / 16) * (15 / 16) / ens.n)


@pytest.mark.parametrize(
    "intervals, message",
    [
        ([[0, 3], [2, 5]], "intervals overlap"),
        ([[3, 3]], "u < v"),
        ([[0, 9]], "endpoints must lie"),
        ([], "at least one interval"),
    ],
)
def test_interval_validation(intervals, message):
    with pytest.raises(DomainError, match=message):
        check_intervals(intervals, 9)


def test_intervals_may_share_endpoints():
    assert check_intervals([[4, 6], [0, 4]], 9).tolist() == [[0, 4], [4, 6]]


def test_constant_depths_match_pointwise_depths(simulator, settings):
    ens = simulator.simulate(BM.smoothed(GAUSSIAN), 3000, 8, seed=1)
    cs = [-1.0, -0.25, 0.0, 0.5]
    fast = constant_depths(ens, cs)
    slow = [empirical_depth(ens, GridFunction.constant(ens.grid, c), settings).value for c in cs]
    np.testing.assert_allclose(fast, slow)


def test_exact_product_depth_of_normals():
    value = exact_product_depth([MarginalSpec.gaussian()] * 10, [0.0] * 10)
    assert value == pytest.approx(2.0**-10, rel=1e-12)


def test_exact_product_depth_point_masses():
    a = [0.3, -1.0, 2.0]
    assert exact_product_depth([MarginalSpec.point_mass(x) for x in a], a) == 1.0
    mixed = [MarginalSpec.gaussian()] * 3 + [MarginalSpec.point_mass(0.0)] * 7
    assert exact_product_depth(mixed, [0.0] * 10) == pytest.approx(1 / 8, rel=1e-12)


def test_exact_product_depth_length_mismatch():
    with pytest.raises(DomainError, match="2 marginals but 3 values"):
        exact_product_depth([MarginalSpec.gaussian()] * 2, [0.0] * 3)


def test_verdict_divergence_for_normals():
    verdict = nasc_verdict([MarginalSpec.gaussian()] * 5, [0.0] * 5, TailModel.constant(1.0))
    assert verdict.kind is VerdictKind.ZERO_BY_DIVERGENCE
    assert verdict.value == 0
    sums = verdict.partial_sums
    assert sums[1000] > sums[100] > sums[10]


def test_verdict_boundary_witness():
    marginals = [MarginalSpec.gaussian(), MarginalSpec.gaussian(), MarginalSpec.uniform(0.0, 1.0)]
    verdict = nasc_verdict(marginals, [0.0, 0.0, 2.0], TailModel.none())
    assert verdict.kind is VerdictKind.ZERO_BY_BOUNDARY
    assert verdict.witness == 3
    assert verdict.side == "above"


def test_verdict_positive_for_summable_atoms():
    k = 6
    marginals = [MarginalSpec.mixture(0.0, 1 - 2.0**-t, MarginalSpec.gaussian()) for t in range(1, k + 1)]
    verdict = nasc_verdict(marginals, [0.0] * k, TailModel.geometric(1.0, 0.5))
    expected = math.prod(1 - 2.0 ** -(t + 1) for t in range(1, 200))
    assert verdict.kind is VerdictKind.POSITIVE
    assert verdict.value == pytest.approx(expected, rel=1e-9)


def test_verdict_boundary_from_tail_model():
    verdict = nasc_verdict([MarginalSpec.gaussian()] * 2, [0.0, 0.0], TailModel.constant(1.0, up=0.0))
    assert verdict.kind is VerdictKind.ZERO_BY_BOUNDARY
    assert (verdict.witness, verdict.side) == (3, "above")


def test_tail_model_validation():
    with pytest.raises(ValidationError, match="0 < ratio < 1"):
        TailModel.geometric(0.5, 1.5)
    with pytest.raises(ValidationError, match="sum to 1"):
        TailModel(kind="constant", scale=0.5, up=0.7, down=0.7)


@pytest.mark.parametrize("m, expected", [(1, 0.5), (10, 184756 / 1048576)])
def test_sparre_andersen_exact(m, expected):
    assert sparre_andersen_exact(m) == pytest.approx(expected, rel=1e-12)


def test_sparre_andersen_large_m():
    value = sparre_andersen_exact(100)
    assert value == pytest.approx(0.056348, abs=1e-6)
    assert value < 1 / math.sqrt(100 * math.pi)
    with pytest.raises(DomainError):
        sparre_andersen_exact(0)


def test_min_min_inequality():
    rng = np.random.default_rng(1)
    for F_n, G_n, F, G in rng.random((5000, 4)):
        assert min_min_check(F_n, G_n, F, G).holds


def test_min_min_on_simulated_runs(simulator, settings):
    model = BM.smoothed(GAUSSIAN)
    h = zero(model.grid(8))
    reference = population_depth_oracle(model, h, 20_000, seed=99, settings=settings)
    for seed in range(5):
        estimate = empirical_depth(simulator.simulate(model, 400, 8, seed), h, settings)
        check = min_min_check(
            estimate.above_fraction, estimate.below_fraction, reference.above_fraction, reference.below_fraction
        )
        assert check.holds


def test_difference_criterion_bounds_depth(simulator, settings):
    ens = simulator.simulate(BM.smoothed(GAUSSIAN), 10_000, 8, seed=12)
    criterion = difference_criterion(ens, IndexSubset.full(ens.grid))
    assert criterion.pairs == 5000
    for c in (-0.5, 0.0, 0.5):
        depth = empirical_depth(ens, GridFunction.constant(ens.grid, c), settings).value
        assert depth <= criterion.depth_bound + 3 * criterion.standard_error


def test_difference_criterion_needs_two_paths(settings):
    ens = PathEnsemble(grid=Grid.uniform(2), paths=[[0.0, 1.0, 2.0]])
    with pytest.raises(DomainError, match="at least two paths"):
        difference_criterion(ens, IndexSubset(indices=[1]))


def test_poisson_oracle(settings):
    model = ProcessModel(kind=ProcessKind.POISSON, rate=1.0)
    estimate = population_depth_oracle(model, zero(model.grid(16)), 40_000, seed=1, settings=settings)
    assert estimate.oracle
    assert estimate.value == pytest.approx(math.exp(-1), abs=0.015)


def test_product_oracle_matches_exact(settings):
    marginals = [MarginalSpec.gaussian()] * 4
    model = ProcessModel(kind=ProcessKind.PRODUCT_SEQUENCE, marginals=marginals)
    estimate = population_depth_oracle(model, zero(model.grid(4)), 40_000, seed=2, settings=settings)
    exact = exact_product_depth(marginals, [0.0] * 4)
    assert abs(estimate.value - exact) <= 3 * math.sqrt(exact * (1 - exact) / estimate.n)


def test_oracle_is_cached(settings, tmp_path):
    model = BM.smoothed(GAUSSIAN)
    h = zero(model.grid(8))
    first = population_depth_oracle(model, h, 5_000, seed=3, settings=settings)
    files = list((tmp_path / "oracles").glob("*.json"))
    assert len(files) == 1
    assert json.loads(files[0].read_text(encoding="utf-8"))["oracle"] is True
    with patch.object(ProcessSimulator, "map_blocks") as mapped:
        second = population_depth_oracle(model, h, 5_000, seed=3, settings=settings)
    mapped.assert_not_called()
    assert second == first


def test_oracle_budget(settings):
    h = zero(BM.grid(8))
    with pytest.raises(DomainError, match="n_ref >= 1000"):
        population_depth_oracle(BM, h, 10, seed=0, settings=settings)
    tight = settings.model_copy(update={"oracle_max_work": 100.0})
    with pytest.raises(ResourceCapError, match="exceeds the cap"):
        population_depth_oracle(BM, h, 5_000, seed=0, settings=tight)


def test_constant_oracle_agrees_with_pointwise_oracle(settings):
    model = BM.smoothed(GAUSSIAN)
    depths = constant_depth_oracle(model, [0.0, 0.5], 8, 5_000, seed=4, settings=settings)
    single = population_depth_oracle(model, GridFunction.constant(model.grid(8), 0.5), 5_000, seed=4, settings=settings, use_cache=False)
    assert depths.shape == (1, 2)
    assert depths[0, 1] == pytest.approx(single.value)


@pytest.mark.parametrize("chunk", [1, 3, 64])
def test_count_sides_is_independent_of_chunking(chunk):
    rng = np.random.default_rng(4)
    paths = rng.integers(-1, 2, size=(500, 9)).astype(float)
    paths[:50] = 0.0
    h = np.zeros(9)
    above = int(np.all(paths >= 0, axis=1).sum())
    below = int(np.all(paths <= 0, axis=1).sum())
    both = int(np.all(paths == 0, axis=1).sum())
    assert count_sides(paths, h, chunk=chunk) == (above, below, both)
    assert both >= 50


def test_count_sides_with_every_row_crossing():
    paths = np.array([[1.0, -1.0, 5.0], [-2.0, 2.0, 0.0]])
    assert count_sides(paths, np.zeros(3), chunk=1) == (0, 0, 0)


@pytest.mark.parametrize("m", [4, 8, 16])
def test_bridge_refinement_does_not_raise_depth(simulator, settings, m):
    coarse = simulator.simulate(BM, 5_000, m, seed=m)
    fine = brownian_bridge_refine(coarse, 4, seed=100 + m)
    before = empirical_depth(coarse, zero(coarse.grid), settings)
    after = empirical_depth(fine, zero(fine.grid), settings)
    assert after.count_above <= before.count_above
    assert after.count_below <= before.count_below
    assert after.value <= before.value


def test_exact_product_depth_is_sign_symmetric():
    rng = np.random.default_rng(8)
    pool = [MarginalSpec.gaussian(0.0, 0.5), MarginalSpec.gaussian(), MarginalSpec.uniform(-1.0, 1.0)]
    for _ in range(200):
        size = int(rng.integers(1, 8))
        marginals = [pool[i] for i in rng.integers(0, len(pool), size)]
        a = rng.normal(0.0, 0.7, size)
        assert exact_product_depth(marginals, a) == pytest.approx(
            exact_product_depth(marginals, -a), rel=1e-9, abs=1e-300
        )
