import math

import numpy as np
import pytest

from pdspectra import quadrature
from pdspectra.errors import NonConvergent


def test_polynomial_exact():
    val, err = quadrature.integrate(lambda x: x ** 7 - 3 * x ** 2, -1.0, 2.0, 1e-14)
    assert val == pytest.approx((2 ** 8 - 1) / 8 - (8 + 1), abs=1e-13)
    assert err <= 1e-14


def test_oscillatory_with_period_hint():
    w = 40.0
    val, _ = quadrature.integrate(lambda x: np.cos(w * x), 0.0, 10.0, 1e-12,
                                  max_width=2 * math.pi / w)
    assert val == pytest.approx(math.sin(w * 10) / w, abs=1e-12)


def test_breakpoint_kink():
    val, _ = quadrature.integrate(lambda x: np.abs(x - 0.3), -1.0, 1.0, 1e-13, breakpoints=(0.3,))
    assert val == pytest.approx(0.5 * 1.3 ** 2 + 0.5 * 0.7 ** 2, abs=1e-13)


def test_complex_integrand_and_reversed_limits():
    val, _ = quadrature.integrate(lambda x: np.exp(1j * x), math.pi, 0.0, 1e-13)
    assert val == pytest.approx(-2j, abs=1e-13)


def test_endpoint_singularity_converges():
    val, _ = quadrature.integrate(lambda x: x ** -0.5, 0.0, 1.0, 1e-10)
    assert val == pytest.approx(2.0, abs=1e-9)


def test_infinite_limits_rejected():
    with pytest.raises(ValueError):
        quadrature.integrate(np.exp, -np.inf, 0.0)


def test_budget_exhaustion_raises():
    with pytest.raises(NonConvergent):
        quadrature.integrate(lambda x: np.sin(1.0 / np.maximum(x, 1e-300)), 0.0, 1.0, 1e-15,
                             max_panels=500)


def test_deterministic_bits():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    a = quadrature.integrate(f, -5, 5, 1e-12)
    b = quadrature.integrate(f, -5, 5, 1e-12)
    assert a == b
