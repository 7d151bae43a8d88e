import math

import numpy as np
import pytest

from pdspectra.errors import MeasureMismatch, NotDifferentiable
from pdspectra.rkhs import (RkhsElement, autocorrelation, convolve_element, distance,
                            factorization_check, inner_product_double, inner_product_spectral,
                            membership_bound, membership_scan, mollifier_distance, norm,
                            norm_double_integral, norm_spectral, reproducing_check, sobolev_identity,
                            spectral_energy, translate, verify_isometry)
from pdspectra.spectra import ClosedFormKernel, get_pair
from pdspectra.testfn import ZERO, BSpline, Bump, Gaussian, Indicator

# mpmath reference values (50 digits, rounded)
TWO_PI_OVER_E = 2.31145469958184343582
TWO_OVER_E = 0.735758882342884643191
CAUCHY_GAUSSIAN = 2.68658684329347034087     # 2 pi e erfc(1)
BUMP_COS = 0.852148708133427853656
BSPLINE_CAUCHY = 0.575046792670574730442
BSPLINE_COS = 0.714511600008281466298

PAIRS = ("cos", "cauchy", "gaussian")


def el(phi, name):
    return RkhsElement(phi, get_pair(name))


@pytest.mark.parametrize("name, phi, want", [
    ("cos", Gaussian(), TWO_PI_OVER_E),
    ("cauchy", Indicator(0, 1), TWO_OVER_E),
    ("cauchy", Gaussian(), CAUCHY_GAUSSIAN),
    ("cos", Bump(), BUMP_COS),
    ("cauchy", BSpline(3), BSPLINE_CAUCHY),
    ("cos", BSpline(3), BSPLINE_COS),
])
def test_norms_against_oracles(name, phi, want):
    x = el(phi, name)
    assert norm_spectral(x) == pytest.approx(want, rel=1e-10)
    assert norm_double_integral(x) == pytest.approx(want, rel=1e-10)


def test_autocorrelation_indicator_is_triangle():
    s = np.linspace(-1.5, 1.5, 31)
    want = np.maximum(1 - np.abs(s), 0)
    assert np.allclose(autocorrelation(Indicator(0, 1), Indicator(0, 1), s), want, atol=1e-14)


def test_autocorrelation_gaussian_closed_form():
    s = np.linspace(-4, 4, 17)
    want = math.sqrt(math.pi) * np.exp(-s ** 2 / 4)
    assert np.allclose(autocorrelation(Gaussian(), Gaussian(), s), want, atol=1e-14)


@pytest.mark.parametrize("name", PAIRS)
def test_inner_products_hermitian_and_agree(name):
    x, y = el(Gaussian(0.3), name), el(Bump(-0.2, 0.8), name)
    a = inner_product_spectral(x, y)
    b = inner_product_double(x, y)
    assert abs(a - b) < 1e-10
    assert abs(inner_product_spectral(y, x) - np.conj(a)) < 1e-12


def test_inner_product_linear_in_first_slot():
    pair = get_pair("cauchy")
    x1, x2, y = el(Gaussian(), "cauchy"), el(Indicator(0, 1), "cauchy"), el(Bump(), "cauchy")
    combo = RkhsElement(2j * Gaussian() + Indicator(0, 1), pair)
    lhs = inner_product_spectral(combo, y)
    rhs = 2j * inner_product_spectral(x1, y) + inner_product_spectral(x2, y)
    assert abs(lhs - rhs) < 1e-10


def test_partner_mismatch_raises():
    with pytest.raises(MeasureMismatch):
        norm_spectral(el(Gaussian(), "cos"), mu=get_pair("cauchy").measure)


def test_zero_function_has_zero_norm():
    assert norm_spectral(el(ZERO, "cos")) == 0.0
    assert norm(el(ZERO, "gaussian")) == 0.0
    assert verify_isometry(ZERO, get_pair("cauchy")).rel_err == 0.0


@pytest.mark.parametrize("name", PAIRS)
@pytest.mark.parametrize("phi", [Gaussian(), Indicator(0, 1), BSpline(3)])
def test_isometry(name, phi):
    assert verify_isometry(phi, get_pair(name)).rel_err <= 1e-9


@pytest.mark.parametrize("name", PAIRS)
@pytest.mark.parametrize("phi", [Gaussian(), BSpline(3), Bump()])
def test_sobolev_identity(name, phi):
    assert sobolev_identity(phi, get_pair(name)).rel_err <= 1e-8


def test_sobolev_rejects_indicator():
    with pytest.raises(NotDifferentiable):
        sobolev_identity(Indicator(0, 1), get_pair("cos"))


def test_reproducing_property():
    r = reproducing_check(ClosedFormKernel("exp_abs"), 0.5, Gaussian())
    assert r.diff < 1e-10
    diffs = [reproducing_check(ClosedFormKernel("cos"), 0.5, Bump(), mollifier_n=n,
                               pair=get_pair("cos")).diff for n in (8, 32, 128)]
    # second-order convergence in 1/n for the symmetric bump
    assert diffs[0] / diffs[1] == pytest.approx(16.0, rel=0.05)
    assert diffs[2] < 1e-5


def test_factorization_converges():
    res = factorization_check(get_pair("cauchy"), 0.3, -0.4)
    errs = [e for _, _, e in res]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-5


def test_mollifier_distance_decreases():
    d = [mollifier_distance(get_pair("cauchy"), 0.0, n) for n in (4, 16, 64)]
    assert d[0] > d[1] > d[2]
    # the rate is about n^(-1/2) for the unit-radius bump
    assert d[1] / d[2] == pytest.approx(2.0, rel=0.05)


def test_mollifier_distance_small_radius():
    assert mollifier_distance(get_pair("cauchy"), 0.0, 256, radius=0.1) < 1e-2


@pytest.mark.parametrize("name", PAIRS)
def test_translation_is_unitary_group(name):
    x = el(Gaussian(0.1, 0.8) + 0.5 * Indicator(0, 1), name)
    n0 = norm_spectral(x)
    for t in (-2.0, 0.7, 5.0):
        assert norm_spectral(translate(x, t)) == pytest.approx(n0, rel=1e-10)
    a = translate(translate(x, 0.7), 1.1)
    b = translate(x, 1.8)
    assert distance(a, b) < 1e-5
    assert translate(x, 0) is x


def test_convolution_contracts():
    x = el(Gaussian(), "cauchy")
    phi = Indicator(0, 0.5)
    assert norm(convolve_element(phi, x)) <= phi.l1_norm() * norm(x) * (1 + 1e-10)


def test_spectral_energy_matches_norm():
    phi = Gaussian()
    assert spectral_energy(phi, get_pair("cos").measure) == pytest.approx(TWO_PI_OVER_E, rel=1e-12)


def test_membership_kernel_itself_bounded():
    # xi = f(. - 0) lies in H_f with A0 = f(0) = 1
    k = ClosedFormKernel("exp_abs")
    est = membership_bound(k, lambda x: np.exp(-np.abs(x)))
    assert est.A0_estimate <= 1.0 + 1e-8
    assert est.A0_estimate > 0.5


def test_membership_linear_function_diverges():
    scan = membership_scan(ClosedFormKernel("exp_abs"), lambda x: x)
    assert scan["diverging"]
