import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdspectra.abelian import (CyclicPdFunction, cyclic_shift, dual_measure, is_positive_definite,
                               isometry_exact, transform)
from pdspectra.errors import NotPositiveDefinite


def test_from_measure_round_trip():
    mu = np.array([0.5, 0.0, 1.5, 2.0])
    f = CyclicPdFunction.from_measure(mu)
    assert np.allclose(dual_measure(f), mu, atol=1e-15)


def test_delta_measure_gives_character():
    N = 8
    mu = np.zeros(N)
    mu[1] = 1.0
    f = CyclicPdFunction.from_measure(mu)
    assert np.allclose(f.values, np.exp(2j * np.pi * np.arange(N) / N))


def test_not_positive_definite():
    f = CyclicPdFunction([1.0, 2.0, 2.0])
    assert not is_positive_definite(f)
    with pytest.raises(NotPositiveDefinite):
        dual_measure(f)
    with pytest.raises(NotPositiveDefinite):
        dual_measure(CyclicPdFunction([1.0, 0.5j, 0.0, 0.0]))


def test_trivial_group():
    f = CyclicPdFunction([2.0])
    r = isometry_exact(f, [3.0])
    assert r.xside == r.freqside == 18.0


@pytest.mark.parametrize("N", [3, 8, 16, 64])
def test_isometry_random(N):
    rng = np.random.default_rng(N)
    for _ in range(25):
        f = CyclicPdFunction.from_measure(rng.exponential(size=N))
        phi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        assert isometry_exact(f, phi).rel_err <= 1e-12


def test_psd_iff_nonnegative_spectrum():
    rng = np.random.default_rng(0)
    for _ in range(100):
        N = int(rng.integers(2, 12))
        v = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        # Hermitian symmetrisation v[-g] = conj(v[g]), then a random diagonal shift
        v = 0.5 * (v + np.conj(np.roll(v[::-1], 1)))
        v[0] += rng.uniform(-1, 3)
        f = CyclicPdFunction(v)
        eig_psd = np.linalg.eigvalsh(f.circulant()).min() >= -1e-12
        assert eig_psd == is_positive_definite(f)


def test_shift_preserves_norm():
    rng = np.random.default_rng(1)
    f = CyclicPdFunction.from_measure(rng.exponential(size=10))
    phi = rng.standard_normal(10)
    base = isometry_exact(f, phi).xside
    for t in (1, 3, 9):
        assert isometry_exact(f, cyclic_shift(phi, t)).xside == pytest.approx(base, rel=1e-13)


def test_isometry_length_mismatch():
    with pytest.raises(ValueError):
        isometry_exact(CyclicPdFunction([1.0, 0.0]), [1.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=1, max_size=20))
def test_transform_parseval(mu):
    phi = np.arange(len(mu), dtype=float)
    assert np.sum(np.abs(transform(phi)) ** 2) == pytest.approx(len(mu) * np.sum(phi ** 2), rel=1e-12)
    f = CyclicPdFunction.from_measure(mu)
    assert is_positive_definite(f)
