import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectra import quadrature
from pdspectra.spectra import CauchyDensity, ClosedFormKernel
from pdspectra.testfn import (BUMP_MASS, DIFFERENTIABLE, ZERO, BSpline, Bump, Gaussian, Indicator,
                              catalog, convolve, convolve_kernel, from_json, mollifier)

Z_ORACLE = 0.443993816168079437823  # integral of exp(-1/(1-u^2)) over (-1, 1), mpmath


def numeric_transform(phi, lam):
    a, b = phi.support(1e-18)
    val, _ = quadrature.integrate(lambda x: phi(x) * np.exp(1j * lam * x), a, b, 1e-13,
                                  breakpoints=phi.breakpoints(), max_width=phi.scale / 4)
    return val


@pytest.mark.parametrize("phi", [Gaussian(0.3, 0.7), Indicator(-0.5, 1.5), BSpline(3, 0.8, 0.2),
                                 Bump(0.4, 1.3), Gaussian(deriv=1), Bump(deriv=1)])
@pytest.mark.parametrize("lam", [0.0, 0.7, -2.5, 9.0])
def test_closed_form_transforms_match_quadrature(phi, lam):
    assert abs(phi.fourier(lam) - numeric_transform(phi, lam)) < 1e-11


def test_indicator_transform_small_argument():
    phi = Indicator(0, 1)
    assert phi.fourier(0.0) == 1.0
    assert phi.fourier(1e-9) == pytest.approx(1 + 0.5e-9j, abs=1e-16)


def test_bump_mass_oracle():
    assert BUMP_MASS == pytest.approx(Z_ORACLE, rel=1e-15)
    assert Bump(0.0, 2.0).fourier(0.0).real == pytest.approx(1.0, abs=1e-14)


def test_bump_fft_agrees_with_trapezoid():
    phi = Bump()
    lam, vals = phi.fourier_fft()
    sel = np.abs(lam) < 30
    assert np.max(np.abs(vals[sel] - phi.fourier(lam[sel]))) < 1e-10


def test_bspline_integrates_to_one_and_is_smooth():
    phi = BSpline(3)
    assert phi.fourier(0.0) == pytest.approx(1.0, abs=1e-15)
    x = np.linspace(*phi.support(), 101)
    assert np.all(phi(x) >= -1e-16)


@pytest.mark.parametrize("name", DIFFERENTIABLE)
def test_derivative_transform_rule(name):
    phi = catalog()[name]
    lam = np.array([0.3, 1.7, 4.0])
    # with phi_hat = integral phi e^{i lam x}, (D phi)^ = -i lam phi_hat
    assert np.allclose(phi.derivative().fourier(lam), -1j * lam * phi.fourier(lam), atol=1e-12)


@pytest.mark.parametrize("phi", [Gaussian(), Bump(), BSpline(3), Indicator(0, 1)])
@pytest.mark.parametrize("L", [5.0, 20.0, 80.0])
def test_fourier_bound_holds(phi, L):
    C, q = phi.fourier_bound(L)
    lam = np.linspace(L, 4 * L, 200)
    assert np.all(np.abs(phi.fourier(lam)) <= C * lam ** (-q) * (1 + 1e-9) + 1e-300)


def test_shift_multiplies_transform_by_phase():
    phi = Bump(0.2, 0.5)
    lam = np.linspace(-6, 6, 13)
    assert np.allclose(phi.shift(1.3).fourier(lam), np.exp(1j * 1.3 * lam) * phi.fourier(lam), atol=1e-14)


def test_mollifier_unit_mass_and_concentration():
    for n in (1, 4, 64):
        m = mollifier(n, 0.5)
        assert m.fourier(0.0).real == pytest.approx(1.0, abs=1e-13)
        a, b = m.support()
        assert b - a == pytest.approx(2.0 / n)


def test_linear_combination_and_zero():
    phi = Gaussian() + 2 * Indicator(0, 1) - Bump()
    lam = 1.1
    want = Gaussian().fourier(lam) + 2 * Indicator(0, 1).fourier(lam) - Bump().fourier(lam)
    assert phi.fourier(lam) == pytest.approx(want, abs=1e-14)
    assert ZERO.is_zero
    assert (Gaussian() - Gaussian()).is_zero


def test_convolution_transform_is_product():
    c = convolve(Indicator(0, 1), Gaussian())
    lam = np.array([0.0, 1.0, 3.0])
    assert np.allclose(c.fourier(lam), Indicator(0, 1).fourier(lam) * Gaussian().fourier(lam))
    # pointwise value: integral over [0,1] of the unit Gaussian shifted to x
    x = 0.5
    want = math.sqrt(math.pi / 2) * (math.erf((x) / math.sqrt(2)) - math.erf((x - 1) / math.sqrt(2)))
    assert c(x) == pytest.approx(want, abs=1e-11)


def test_json_round_trip():
    for phi in list(catalog().values()) + [Gaussian(1, 2) + 0.5 * Bump(), convolve(Bump(), Gaussian())]:
        doc = json.loads(json.dumps(phi.to_json()))
        assert from_json(doc) == phi


def test_convolve_kernel_cos_gaussian():
    # integral phi(y) cos(x - y) dy = Re(e^{ix} phi_hat(-1)) for real phi
    val = convolve_kernel(Gaussian(), ClosedFormKernel("cos"), 0.4)
    assert val == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-0.5) * math.cos(0.4), abs=1e-11)


def test_sq_tail_bounds_actual_tail():
    dens = CauchyDensity()
    for phi in (Indicator(0, 1), Bump(), Gaussian()):
        L = 10.0
        c, b = phi.sq_tail(L, dens)
        actual, _ = quadrature.integrate(lambda l: np.abs(phi.fourier(l)) ** 2 * dens(l), L, 4000.0, 1e-13,
                                         max_width=0.5)
        actual *= 2
        assert actual <= abs(c) + b + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(-10, 10))
def test_gaussian_transform_modulus_even(c, w, lam):
    phi = Gaussian(c, w)
    assert abs(phi.fourier(lam)) == pytest.approx(abs(phi.fourier(-lam)), rel=1e-12, abs=1e-300)
