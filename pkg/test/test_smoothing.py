import math
from unittest.mock import patch

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate, stats

from hrdepth.config import Settings
from hrdepth.depth import empirical_depth
from hrdepth.exceptions import DomainError, NumericError
from hrdepth.gridfn import FamilyKind, FamilySpec, Grid, GridFunction, sample_family, sup_norm
from hrdepth.processes import PathEnsemble, ProcessKind, ProcessModel, ProcessSimulator
from hrdepth.smoothing import (
    DensityFamily,
    SmoothingDensity,
    bracket_width_check,
    density_mass,
    grad_l1,
    grad_l1_quadrature,
    margin_shift_check,
    positivity_floor,
    smooth_ensemble,
    tv_shift_check,
)
from hrdepth.smoothing import operations

GAUSSIAN = SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=1.0)
LAPLACE = SmoothingDensity(family=DensityFamily.LAPLACE, scale=1.0)
CAUCHY = SmoothingDensity(family=DensityFamily.CAUCHY, scale=1.0)
BM = ProcessModel(kind=ProcessKind.BROWNIAN_MOTION)


@pytest.fixture
def settings():
    return Settings(jobs=1)


@pytest.fixture
def simulator(settings):
    return ProcessSimulator(settings)


@pytest.fixture
def smoothed_bm(simulator):
    return simulator.simulate(BM.smoothed(GAUSSIAN), 20_000, 16, seed=21)


@pytest.mark.parametrize(
    "density, expected",
    [(GAUSSIAN, 2 / math.sqrt(2 * math.pi)), (LAPLACE, 1.0), (CAUCHY, 2 / math.pi)],
)
def test_grad_l1_closed_form_and_quadrature(density, expected):
    assert grad_l1(density) == pytest.approx(expected, rel=1e-12)
    assert grad_l1_quadrature(density) == pytest.approx(expected, abs=1e-6)


def test_grad_l1_scales_inversely():
    wide = SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=2.0)
    assert grad_l1(wide) == pytest.approx(grad_l1(GAUSSIAN) / 2)


@pytest.mark.parametrize("density", [GAUSSIAN, LAPLACE, CAUCHY])
def test_densities_integrate_to_one(density):
    assert density_mass(density) == pytest.approx(1.0, abs=1e-7)


def test_scale_must_be_positive():
    with pytest.raises(ValidationError):
        SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=0.0)


def test_tv_shift_gaussian_matches_closed_form():
    result = tv_shift_check(GAUSSIAN, 0.1)
    closed = 2 * (2 * stats.norm.cdf(0.05) - 1)
    assert result.lhs == pytest.approx(closed, abs=1e-8)
    assert 0.0795 <= result.lhs <= 0.0800
    assert result.rhs == pytest.approx(0.1 * 0.7978845608, rel=1e-9)
    assert result.w3_bound == pytest.approx(2 * result.rhs)
    assert result.holds


def test_tv_shift_zero_delta():
    result = tv_shift_check(GAUSSIAN, 0.0)
    assert (result.lhs, result.rhs, result.w3_bound) == (0.0, 0.0, 0.0)


def test_tv_shift_laplace():
    result = tv_shift_check(LAPLACE, 0.5)
    assert result.rhs == pytest.approx(0.5)
    assert result.lhs == pytest.approx(2 * (1 - math.exp(-0.25)), abs=1e-7)
    assert result.lhs < result.rhs


@pytest.mark.parametrize("density", [GAUSSIAN, LAPLACE, CAUCHY])
@pytest.mark.parametrize("delta", [-5.0, -1.0, -0.1, -0.01, 0.01, 0.1, 1.0, 5.0])
def test_tv_shift_bound_holds(density, delta):
    assert tv_shift_check(density, delta).holds


def test_quadrature_failure_becomes_numeric_error():
    failure = integrate.IntegrationWarning("The maximum number of subdivisions has been achieved.")
    with patch.object(operations.integrate, "quad", side_effect=failure):
        with pytest.raises(NumericError, match="did not converge") as info:
            tv_shift_check(GAUSSIAN, 0.1)
    assert "interval" in info.value.diagnostics


def test_smoothing_zero_ensemble_gives_constant_paths():
    ens = PathEnsemble(grid=Grid.uniform(4), paths=np.zeros((1000, 5)))
    smoothed = smooth_ensemble(ens, GAUSSIAN, seed=4)
    assert smoothed.smoothed and smoothed.smoothing == GAUSSIAN
    assert np.all(smoothed.paths == smoothed.paths[:, :1])
    depth = empirical_depth(smoothed, GridFunction.constant(ens.grid, 0.0), Settings(jobs=1))
    assert depth.value == pytest.approx(0.5, abs=0.05)


def test_smoothing_keeps_increments(simulator):
    ens = simulator.simulate(BM, 200, 8, seed=1)
    smoothed = smooth_ensemble(ens, LAPLACE, seed=2)
    np.testing.assert_allclose(np.diff(smoothed.paths, axis=1), np.diff(ens.paths, axis=1), atol=1e-12)


def test_smoothing_matches_smoothed_simulation(simulator):
    ens = simulator.simulate(BM, 300, 8, seed=5)
    direct = simulator.simulate(BM.smoothed(GAUSSIAN), 300, 8, seed=5)
    np.testing.assert_array_equal(smooth_ensemble(ens, GAUSSIAN, seed=5).paths, direct.paths)


def test_smoothing_twice_is_rejected(smoothed_bm):
    with pytest.raises(DomainError, match="already smoothed"):
        smooth_ensemble(smoothed_bm, GAUSSIAN, seed=1)


def test_margin_shift_bound(smoothed_bm):
    grid = smoothed_bm.grid
    result = margin_shift_check(
        smoothed_bm, GAUSSIAN, GridFunction.constant(grid, 0.0), GridFunction.constant(grid, 0.2), 0.0
    )
    assert result.bound == pytest.approx(2 * 0.2 * grad_l1(GAUSSIAN))
    assert result.difference > 0
    assert result.passed


def test_margin_shift_bound_on_random_lipschitz_pairs(smoothed_bm):
    family = FamilySpec(kind=FamilyKind.LIPSCHITZ_BALL, grid=smoothed_bm.grid, radius=1.0, lipschitz=2.0)
    members = sample_family(family, 200, seed=17)
    thresholds = np.random.default_rng(17).uniform(-1.5, 1.5, 100)
    for h1, h2, x in zip(members[::2], members[1::2], thresholds):
        result = margin_shift_check(smoothed_bm, GAUSSIAN, h1, h2, float(x))
        assert result.bound == pytest.approx(2 * sup_norm(h1 - h2) * grad_l1(GAUSSIAN))
        assert result.passed, (x, result)


def test_bracket_width_bound(smoothed_bm):
    h = GridFunction.constant(smoothed_bm.grid, 0.0)
    result = bracket_width_check(smoothed_bm, GAUSSIAN, h, 0.05)
    assert 0 < result.width <= result.bound
    assert result.passed
    with pytest.raises(DomainError, match="non-negative"):
        bracket_width_check(smoothed_bm, GAUSSIAN, h, -0.1)


def test_positivity_floor_is_below_depth(simulator):
    base = simulator.simulate(BM, 20_000, 16, seed=3)
    smoothed = smooth_ensemble(base, GAUSSIAN, seed=3)
    family = FamilySpec(kind=FamilyKind.LIPSCHITZ_BALL, grid=base.grid, radius=1.0, lipschitz=2.0)
    functions = [GridFunction.constant(base.grid, 0.0)] + sample_family(family, 20, seed=29)
    for h in functions:
        floor = positivity_floor(base, GAUSSIAN, h)
        assert floor.h_norm == pytest.approx(sup_norm(h))
        assert 0 < floor.floor < empirical_depth(smoothed, h, Settings(jobs=1)).value


def test_positivity_floor_needs_unsmoothed(smoothed_bm):
    with pytest.raises(DomainError, match="unsmoothed"):
        positivity_floor(smoothed_bm, GAUSSIAN, GridFunction.constant(smoothed_bm.grid, 0.0))
