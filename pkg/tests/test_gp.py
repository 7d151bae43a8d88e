import math

import numpy as np
import pytest

from pdspectra.errors import FactorizationFailure, InvalidMeasure
from pdspectra.gp import (GpModel, _factor, characteristic_functional_check, covariance,
                          covariance_matrix, increment_mass, moment_checks, sample_paths, variance_r)
from pdspectra.rkhs import spectral_energy
from pdspectra.spectra import PowerDensity, SpectralMeasure, fbm_measure, get_pair, lebesgue
from pdspectra.testfn import Gaussian, Indicator

FBM_CONSTANT = 6.68434206568266800644      # r(x) / |x|^(3/2) for density |lam|^(-1/2), mpmath
CF_COS_GAUSSIAN = 0.314828463188276787417  # exp(-pi / e)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, -3.0])
def test_lebesgue_variance_is_linear(x):
    assert variance_r(lebesgue(), x) / (2 * math.pi * abs(x)) == pytest.approx(1.0, abs=1e-10)


def test_fbm_variance_scaling():
    mu = fbm_measure(0.75)
    for x in (0.25, 1.0, 4.0):
        assert variance_r(mu, x) / abs(x) ** 1.5 == pytest.approx(FBM_CONSTANT, rel=1e-9)


def test_single_atom_variance():
    mu = SpectralMeasure(((-1.0, 0.5), (1.0, 0.5)))
    assert variance_r(mu, math.pi) == pytest.approx(4.0, abs=1e-14)
    assert variance_r(mu, 0.0) == 0.0


def test_variance_matches_indicator_energy():
    # r(x) = integral |1_[0,x]^|^2 dmu
    for name in ("cos", "cauchy", "gaussian", "lebesgue", "fbm"):
        mu = get_pair(name).measure
        assert variance_r(mu, 1.3) == pytest.approx(spectral_energy(Indicator(0, 1.3), mu), rel=1e-9)


def test_brownian_covariance_is_min():
    assert covariance(lebesgue(), 1.0, 2.0) == pytest.approx(2 * math.pi, rel=1e-10)
    assert covariance(lebesgue(), -1.0, 2.0) == pytest.approx(0.0, abs=1e-9)


def test_nonintegrable_measure_rejected():
    mu = SpectralMeasure(density=PowerDensity(1.5), growth=2)
    assert not math.isfinite(increment_mass(mu))
    with pytest.raises(InvalidMeasure):
        variance_r(mu, 1.0)
    with pytest.raises(InvalidMeasure):
        PowerDensity(-3.0)


def test_asymmetric_measure_symmetrised_with_warning():
    with pytest.warns(UserWarning):
        GpModel(SpectralMeasure(((1.0, 1.0),)), (0.0, 1.0))


def test_model_grid_validation():
    with pytest.raises(ValueError):
        GpModel(lebesgue(), (0.5, 1.0))
    with pytest.raises(ValueError):
        GpModel(lebesgue(), (0.0, 1.0, 1.0))


def test_covariance_matrix_psd():
    C = covariance_matrix(fbm_measure(0.75), np.linspace(0, 3, 7))
    assert np.all(np.linalg.eigvalsh(C) > -1e-10)
    assert np.all(C[0] == 0)


def test_factor_reproduces_covariance():
    C = covariance_matrix(lebesgue(), np.linspace(0, 2, 5))
    A = _factor(C)
    assert np.allclose(A @ A.T, C, atol=1e-12)
    with pytest.raises(FactorizationFailure):
        _factor(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_sampling_reproducible_and_correct():
    model = GpModel(lebesgue(), tuple(np.linspace(0, 5, 11)), seed=3)
    a = sample_paths(model, 20000)
    b = sample_paths(model, 20000)
    assert np.array_equal(a, b)
    assert np.all(a[:, 0] == 0)
    checks = moment_checks(model, a)
    assert max(c.z_score for c in checks) < 4.5
    assert sample_paths(model, 0).shape == (0, 11)


def test_different_seeds_differ():
    grid = (0.0, 1.0)
    a = sample_paths(GpModel(lebesgue(), grid, seed=1), 10)
    b = sample_paths(GpModel(lebesgue(), grid, seed=2), 10)
    assert not np.array_equal(a, b)


def test_characteristic_functional():
    rep = characteristic_functional_check(get_pair("cos").measure, Gaussian(), 200000, seed=5)
    assert rep.predicted == pytest.approx(CF_COS_GAUSSIAN, rel=1e-12)
    assert rep.error <= 3 / math.sqrt(rep.n_samples)
