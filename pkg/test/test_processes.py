import json

import numpy as np
import pytest
from scipy import stats
from pydantic import ValidationError

from hrdepth.config import Settings
from hrdepth.exceptions import DomainError, ResourceCapError
from hrdepth.gridfn import Grid
from hrdepth.processes import (
    MarginalSpec,
    PathEnsemble,
    ProcessKind,
    ProcessModel,
    ProcessSimulator,
    StreamTag,
    block_generator,
    brownian_bridge_refine,
    derive_seed,
    marginal_cdf,
    read_ensemble,
    rows_per_block,
    sidecar_path,
    tail_probabilities,
    write_ensemble,
)
from hrdepth.smoothing import DensityFamily, SmoothingDensity

BM = ProcessModel(kind=ProcessKind.BROWNIAN_MOTION)


@pytest.fixture
def simulator():
    return ProcessSimulator(Settings(jobs=1))


def test_simulation_is_deterministic(simulator):
    a = simulator.simulate(BM, 300, 8, seed=7)
    b = simulator.simulate(BM, 300, 8, seed=7)
    np.testing.assert_array_equal(a.paths, b.paths)
    c = simulator.simulate(BM, 300, 8, seed=8)
    assert not np.array_equal(a.paths, c.paths)


@pytest.mark.parametrize(
    "kind, m",
    [(ProcessKind.BROWNIAN_MOTION, 64), (ProcessKind.POISSON, 64), (ProcessKind.BROWNIAN_SHEET, 4)],
)
def test_simulation_ignores_job_count(kind, m):
    """Block streams make the ensemble independent of the worker count."""
    model = ProcessModel(kind=kind)
    n = 3 * rows_per_block(model.grid(m).size) + 5
    serial = ProcessSimulator(Settings(jobs=1)).simulate(model, n, m, 3)
    parallel = ProcessSimulator(Settings(jobs=4)).simulate(model, n, m, 3)
    np.testing.assert_array_equal(serial.paths, parallel.paths)


def test_prefix_of_larger_ensemble(simulator):
    small = simulator.simulate(BM, 50, 8, seed=1)
    large = simulator.simulate(BM, 5000, 8, seed=1)
    np.testing.assert_array_equal(small.paths, large.paths[:50])


def test_tied_down_paths_start_at_zero(simulator):
    for kind in (ProcessKind.BROWNIAN_MOTION, ProcessKind.SYMMETRIC_STABLE, ProcessKind.POISSON):
        ens = simulator.simulate(ProcessModel(kind=kind, alpha=1.5), 200, 16, seed=2)
        assert np.all(ens.paths[:, 0] == 0.0)


def test_bm_terminal_variance(simulator):
    ens = simulator.simulate(BM, 50_000, 16, seed=11)
    assert np.var(ens.paths[:, -1]) == pytest.approx(1.0, rel=0.03)


def test_poisson_terminal_mean(simulator):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.POISSON, rate=1.0), 50_000, 16, seed=5)
    assert np.mean(ens.paths[:, -1]) == pytest.approx(1.0, rel=0.02)
    assert np.all(np.diff(ens.paths, axis=1) >= 0)
    assert np.all(ens.paths == np.round(ens.paths))


def test_compound_poisson_uses_jumps(simulator):
    model = ProcessModel(kind=ProcessKind.COMPOUND_POISSON, rate=2.0, jump=MarginalSpec.point_mass(0.5))
    ens = simulator.simulate(model, 20_000, 8, seed=4)
    assert np.mean(ens.paths[:, -1]) == pytest.approx(1.0, rel=0.03)
    assert np.all(np.isclose(ens.paths * 2, np.round(ens.paths * 2)))


def test_compound_poisson_needs_jump():
    with pytest.raises(ValidationError, match="jump distribution"):
        ProcessModel(kind=ProcessKind.COMPOUND_POISSON)


def test_reflected_bm_is_non_negative(simulator):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.REFLECTED_BM), 1000, 32, seed=6)
    assert np.all(ens.paths >= 0)


def test_sheet_covariance(simulator):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.BROWNIAN_SHEET), 50_000, 2, seed=9)
    centre, corner = ens.paths[:, 4], ens.paths[:, 8]
    assert np.cov(centre, corner)[0, 1] == pytest.approx(0.25, abs=0.02)
    edges = ens.paths.reshape(-1, 3, 3)
    assert np.all(edges[:, 0, :] == 0) and np.all(edges[:, :, 0] == 0)


def test_sheet_memory_cap():
    simulator = ProcessSimulator(Settings(jobs=1, sheet_max_points=100))
    with pytest.raises(ResourceCapError, match="cap is 100"):
        simulator.simulate(ProcessModel(kind=ProcessKind.BROWNIAN_SHEET), 20, 4, seed=0)


def test_stable_is_symmetric(simulator):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.SYMMETRIC_STABLE, alpha=1.0), 20_000, 4, seed=12)
    assert np.mean(ens.paths[:, -1] > 0) == pytest.approx(0.5, abs=0.015)


def test_sample_product_point_masses(simulator):
    marginals = [MarginalSpec.point_mass(a) for a in (0.5, -1.0, 2.0)]
    ens = simulator.sample_product(marginals, 100, seed=3)
    assert np.all(ens.paths == np.array([0.5, -1.0, 2.0]))


def test_sample_product_two_point_and_normals(simulator):
    ens = simulator.sample_product([MarginalSpec.two_point(1.0, 0.5)] * 4, 500, seed=3)
    assert set(np.unique(ens.paths)) <= {-1.0, 1.0}
    normals = simulator.sample_product([MarginalSpec.gaussian()] * 10, 20_000, seed=3)
    assert np.all(np.abs(normals.paths.mean(axis=0)) < 0.05)


def test_product_coordinate_count_must_match(simulator):
    model = ProcessModel(kind=ProcessKind.PRODUCT_SEQUENCE, marginals=[MarginalSpec.gaussian()] * 3)
    with pytest.raises(DomainError, match="3 coordinates"):
        simulator.simulate(model, 10, 4, seed=0)


def test_sample_product_needs_marginals(simulator):
    with pytest.raises(DomainError, match="non-empty"):
        simulator.sample_product([], 10, seed=0)


@pytest.mark.parametrize(
    "spec, x, expected",
    [
        (MarginalSpec.gaussian(), 0.0, (0.5, 0.5)),
        (MarginalSpec.point_mass(0.0), 0.0, (1.0, 0.0)),
        (MarginalSpec.two_point(1.0, 0.5), 1.0, (1.0, 0.5)),
        (MarginalSpec.uniform(0.0, 1.0), 0.25, (0.25, 0.25)),
    ],
)
def test_marginal_cdf(spec, x, expected):
    F, F_left = marginal_cdf(spec, x)
    assert (F, F_left) == pytest.approx(expected)
    assert F >= F_left


def test_tail_probabilities_of_mixture():
    spec = MarginalSpec.mixture(0.0, 0.75, MarginalSpec.gaussian())
    up, down = tail_probabilities(spec, 0.0)
    assert up == pytest.approx(0.75 + 0.25 * 0.5)
    assert down == pytest.approx(0.75 + 0.25 * 0.5)


def test_marginal_validation():
    with pytest.raises(ValidationError, match="a < b"):
        MarginalSpec.uniform(1.0, 0.0)


def test_write_read_round_trip(simulator, tmp_path):
    model = BM.smoothed(SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=1.0))
    ens = simulator.simulate(model, 25, 8, seed=7)
    path = tmp_path / "p.csv"
    write_ensemble(ens, path, extra={"note": "x"})
    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    assert meta["seed"] == 7 and meta["smoothed"] and meta["note"] == "x"
    back = read_ensemble(path)
    np.testing.assert_array_equal(back.paths, ens.paths)
    assert back.grid.same_as(ens.grid)
    assert back.model == model
    assert back.smoothing == model.smoothing


def test_write_read_sheet(simulator, tmp_path):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.BROWNIAN_SHEET), 5, 3, seed=1)
    path = tmp_path / "sheet.csv"
    write_ensemble(ens, path)
    back = read_ensemble(path)
    assert back.grid.dim == 2
    np.testing.assert_array_equal(back.paths, ens.paths)


def test_read_without_sidecar(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("0,0.5,1\n1,1,1\n2,2,2\n", encoding="utf-8")
    ens = read_ensemble(path)
    assert ens.n == 2 and ens.model is None


def test_tied_down_start_is_validated():
    with pytest.raises(ValidationError, match="start at 0"):
        PathEnsemble(grid=Grid.uniform(2), paths=[[1.0, 0.0, 0.0]], model=BM)


def test_bridge_refinement_keeps_coarse_points(simulator):
    ens = simulator.simulate(BM, 400, 4, seed=2)
    fine = brownian_bridge_refine(ens, 4, seed=9)
    assert fine.grid.same_as(Grid.uniform(16))
    np.testing.assert_array_equal(fine.paths[:, ::4], ens.paths)


def test_bridge_refinement_has_brownian_increments(simulator):
    ens = simulator.simulate(BM, 40_000, 2, seed=2)
    fine = brownian_bridge_refine(ens, 8, seed=3)
    increments = np.diff(fine.paths, axis=1)
    assert np.var(increments[:, 3]) == pytest.approx(1 / 16, rel=0.05)


def test_bridge_refinement_needs_bm(simulator):
    ens = simulator.simulate(ProcessModel(kind=ProcessKind.POISSON), 10, 4, seed=2)
    with pytest.raises(DomainError, match="Brownian motion"):
        brownian_bridge_refine(ens, 2, seed=0)


def test_streams_are_keyed():
    a = block_generator(1, StreamTag.PATHS, 0).standard_normal(4)
    b = block_generator(1, StreamTag.PATHS, 0).standard_normal(4)
    c = block_generator(1, StreamTag.SMOOTHING, 0).standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert derive_seed(5, 100, 2) == derive_seed(5, 100, 2) != derive_seed(5, 100, 3)


def test_rows_per_block_bounds():
    assert rows_per_block(1) == 8192
    assert rows_per_block(10**7) == 64


@pytest.mark.parametrize(
    "model",
    [
        ProcessModel(kind=ProcessKind.POISSON, rate=3.0),
        ProcessModel(kind=ProcessKind.INTEGRATED_POISSON, rate=3.0),
        ProcessModel(kind=ProcessKind.COMPOUND_POISSON, rate=3.0, jump=MarginalSpec.uniform(0.0, 1.0)),
    ],
    ids=lambda model: model.kind.value,
)
def test_counting_paths_are_non_decreasing(simulator, model):
    ens = simulator.simulate(model, 2000, 32, seed=13)
    assert np.all(np.diff(ens.paths, axis=1) >= 0)
    if model.kind is ProcessKind.POISSON:
        assert np.all(ens.paths == np.round(ens.paths))


def test_stable_two_matches_brownian_marginals(simulator):
    stable = simulator.simulate(ProcessModel(kind=ProcessKind.SYMMETRIC_STABLE, alpha=2.0), 20_000, 8, seed=21)
    brownian = simulator.simulate(BM, 20_000, 8, seed=22)
    for column in (1, 4, 8):
        assert stats.ks_2samp(stable.paths[:, column], brownian.paths[:, column]).pvalue > 1e-4
    assert np.var(stable.paths[:, -1]) == pytest.approx(1.0, rel=0.04)
