"""Exact finite model on the cyclic group Z_N.

Haar measure on Z_N is counting measure; on the dual (again Z_N, characters
``chi_k(g) = exp(2 pi i k g / N)``) the measure ``mu`` is defined by
``f[g] = sum_k mu[k] chi_k(g)``, so ``mu = fft(f) / N``.  With
``phi_hat[k] = sum_g chi_k(g) phi[g]`` the isometry reads

    sum_{g,h} phi[g] conj(phi[h]) f[g - h] = sum_k mu[k] |phi_hat[k]|^2

with no further constants.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite

NEG_TOL = 1e-12


@dataclass(frozen=True)
class CyclicPdFunction:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.size == 0:
            raise ValueError("need N >= 1 values")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return len(self.values)

    @classmethod
    def from_measure(cls, mu) -> "CyclicPdFunction":
        """``f[g] = sum_k mu[k] chi_k(g)``."""
        mu = np.asarray(mu, dtype=float)
        return cls(np.fft.ifft(mu) * len(mu))

    def circulant(self) -> np.ndarray:
        """``G[i, j] = f[(i - j) mod N]``."""
        n = self.N
        idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
        return self.values[idx]


def dual_coefficients(f: CyclicPdFunction) -> np.ndarray:
    """Raw ``(1/N) sum_g f[g] conj(chi_k(g))``, complex and unclipped."""
    return np.fft.fft(f.values) / f.N


def dual_measure(f: CyclicPdFunction) -> np.ndarray:
    """The nonnegative measure on the dual group representing ``f``.

    Raises NotPositiveDefinite if a coefficient is below ``-1e-12`` or not
    real to that tolerance; small negative values are clipped to 0.
    """
    c = dual_coefficients(f)
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.any(np.abs(c.imag) > NEG_TOL * scale):
        raise NotPositiveDefinite("f is not Hermitian: its dual coefficients are not real")
    mu = c.real
    if np.any(mu < -NEG_TOL * scale):
        raise NotPositiveDefinite(f"dual coefficient {mu.min():.3e} is negative")
    return np.where(mu < 0, 0.0, mu)


def is_positive_definite(f: CyclicPdFunction) -> bool:
    try:
        dual_measure(f)
    except NotPositiveDefinite:
        return False
    return True


def transform(phi) -> np.ndarray:
    """``phi_hat[k] = sum_g exp(2 pi i k g / N) phi[g]``."""
    phi = np.asarray(phi, dtype=complex)
    return np.fft.ifft(phi) * len(phi)


@dataclass(frozen=True)
class ExactIsometry:
    xside: float
    freqside: float

    @property
    def rel_err(self) -> float:
        scale = max(abs(self.xside), abs(self.freqside))
        return 0.0 if scale == 0 else abs(self.xside - self.freqside) / scale


def isometry_exact(f: CyclicPdFunction, phi) -> ExactIsometry:
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (f.N,):
        raise ValueError(f"phi must have length {f.N}")
    mu = dual_measure(f)
    x = complex(phi @ f.circulant() @ np.conj(phi))
    freq = float(np.dot(mu, np.abs(transform(phi)) ** 2))
    return ExactIsometry(x.real, freq)


def cyclic_shift(phi, t: int) -> np.ndarray:
    """``phi[(g - t) mod N]``."""
    return np.roll(np.asarray(phi), t)
