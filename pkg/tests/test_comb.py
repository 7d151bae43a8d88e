import math

import numpy as np
import pytest

from pdspectra.comb import (DiracComb, coefficient_tail, comb_element, comb_norm_identity,
                            periodic_l2_norm, periodic_l2_quadrature, poisson_side, tempered_sum)
from pdspectra.errors import TailNotCertified
from pdspectra.spectra import get_pair
from pdspectra.testfn import ZERO, BSpline, Bump, Gaussian, Indicator

COMB_GAUSSIAN = 11.1378080403267119604   # 2 pi sum_n exp(-n^2), mpmath
PI_COTH_PI = 3.15334809493716234827


def test_gaussian_identity_oracle():
    r = comb_norm_identity(Gaussian())
    assert r.freqside == pytest.approx(COMB_GAUSSIAN, rel=1e-13)
    assert r.xside == pytest.approx(COMB_GAUSSIAN, rel=1e-13)
    assert r.tail_bound <= 1e-10


@pytest.mark.parametrize("phi", [Bump(), BSpline(3), Gaussian(0.4, 1.3), Bump(0.3, 2.0)])
def test_identity_both_sides_agree(phi):
    r = comb_norm_identity(phi)
    assert abs(r.xside - r.freqside) <= 1e-9 * max(1.0, r.xside)


def test_truncation_extends_until_certified():
    r = comb_norm_identity(BSpline(3), DiracComb(truncation=16))
    assert r.truncation > 16
    assert r.tail_bound <= 1e-10


def test_indicator_tail_cannot_be_certified_cheaply():
    # |phi_hat|^2 decays like lam^-2: the tail bound shrinks only like 1/N
    with pytest.raises(TailNotCertified):
        comb_norm_identity(Indicator(0, 1), tol=1e-10, max_truncation=1 << 12)


def test_element_tail_raises():
    with pytest.raises(TailNotCertified):
        comb_element(BSpline(3), DiracComb(truncation=4), tol=1e-12)


def test_spacing_scales_frequencies():
    comb = DiracComb(spacing=0.5, truncation=40)
    r = comb_norm_identity(Gaussian(), comb)
    want = 2 * math.pi * sum(math.exp(-(0.5 * n) ** 2) for n in range(-60, 61))
    assert r.freqside == pytest.approx(want, rel=1e-13)
    assert r.xside == pytest.approx(want, rel=1e-12)


def test_periodic_quadrature_matches_coefficient_norm():
    el = comb_element(Gaussian(), DiracComb(truncation=12))
    assert periodic_l2_quadrature(el) == pytest.approx(periodic_l2_norm(el), rel=1e-12)


def test_partial_sum_is_periodic():
    el = comb_element(Bump(), DiracComb(truncation=10))
    x = np.linspace(-3, 3, 7)
    assert np.allclose(el(x), el(x + 2 * math.pi), atol=1e-12)


def test_zero_function():
    assert poisson_side(ZERO) == 0.0
    assert coefficient_tail(ZERO, DiracComb()) == 0.0
    r = comb_norm_identity(ZERO)
    assert r.xside == r.freqside == 0.0


def test_comb_kernel_fejer_nonnegative():
    k = DiracComb(truncation=8).kernel()
    x = np.linspace(-math.pi, math.pi, 401)
    assert np.all(np.real(k(x)) >= -1e-12)
    assert get_pair("comb").measure.growth >= 1


def test_tempered_sum_bound():
    for N in (10, 100, 1000):
        partial, bound = tempered_sum(N)
        assert 0 <= PI_COTH_PI - partial <= bound


def test_bad_comb_parameters():
    with pytest.raises(ValueError):
        DiracComb(spacing=0.0)
    with pytest.raises(ValueError):
        DiracComb(regularization="abel")
