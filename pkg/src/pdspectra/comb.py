"""The Dirac comb ``mu = sum_n delta_{n s}`` and its space H_f.

H_f for the comb is the space of ``2 pi / s``-periodic functions
``sum_n phi_hat(n s) exp(-i n s x)`` with the l^2 norm of the coefficients.  The
formal series ``f(x) = sum_n exp(i n s x)`` is never summed pointwise without a
Fejer or truncation window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import TailNotCertified
from .rkhs import autocorrelation
from .spectra import SeriesKernel, SpectralMeasure
from .testfn import TestFunction


@dataclass(frozen=True)
class DiracComb:
    spacing: float = 1.0
    truncation: int = 64
    regularization: str = "fejer"

    def __post_init__(self):
        if self.spacing <= 0:
            raise ValueError("comb spacing must be positive")
        if self.truncation < 0:
            raise ValueError("truncation must be >= 0")
        if self.regularization not in ("truncate", "fejer"):
            raise ValueError(f"unknown regularization {self.regularization!r}")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.truncation, self.truncation + 1)

    @property
    def frequencies(self) -> np.ndarray:
        return self.indices * self.spacing

    @property
    def measure(self) -> SpectralMeasure:
        """Truncated view of the comb as a tempered measure of order 1."""
        return SpectralMeasure(tuple((float(l), 1.0) for l in self.frequencies), growth=1)

    def kernel(self) -> SeriesKernel:
        return SeriesKernel(self.frequencies, self.regularization)


@dataclass(frozen=True)
class CombElement:
    """Fourier coefficients ``c_n = phi_hat(n s)`` of ``phi * f`` for ``|n| <= N``."""

    indices: np.ndarray
    coefficients: np.ndarray
    tail_bound: float
    spacing: float = 1.0

    def __call__(self, x):
        """Partial sum ``sum_n c_n exp(-i n s x)``."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(-1j * np.multiply.outer(x, self.indices * self.spacing))
        return phase @ self.coefficients


def coefficient_tail(phi: TestFunction, comb: DiracComb) -> float:
    """Bound on ``sum_{|n| > N} |phi_hat(n s)|^2`` from the transform's decay."""
    if phi.is_zero:
        return 0.0
    N, s = comb.truncation, comb.spacing
    if N == 0:
        return math.inf
    C, q = phi.fourier_bound((N + 1) * s)
    if q <= 0.5:
        return math.inf
    # sum_{n > N} (n s)^(-2q) <= integral_N^inf (x s)^(-2q) dx
    return 2.0 * C * C * s ** (-2 * q) * N ** (1 - 2 * q) / (2 * q - 1)


def comb_element(phi: TestFunction, comb: DiracComb = DiracComb(), tol: float | None = None) -> CombElement:
    """Coefficients ``phi_hat(n s)``, ``|n| <= N``, with their l^2 tail bound.

    Raises TailNotCertified if ``tol`` is given and the tail bound exceeds it.
    """
    idx = comb.indices
    if phi.is_zero:
        coef = np.zeros(len(idx), dtype=complex)
    else:
        coef = np.asarray(phi.fourier(idx * comb.spacing), dtype=complex)
    tail = coefficient_tail(phi, comb)
    if tol is not None and tail > tol:
        raise TailNotCertified(f"coefficient tail {tail:.3e} exceeds {tol:.3e} at N={comb.truncation}")
    return CombElement(idx, coef, tail, comb.spacing)


def periodic_l2_norm(coefficients) -> float:
    """``sum |c_n|^2``, the normalised L^2 norm of ``sum c_n e_n`` over one period."""
    c = np.asarray(coefficients.coefficients if isinstance(coefficients, CombElement) else coefficients,
                   dtype=complex)
    return float(np.sum(np.abs(c) ** 2))


def periodic_l2_quadrature(element: CombElement, tol: float = 1e-12) -> float:
    """``(s / 2 pi) integral over one period of |h|^2`` by quadrature of the partial sum."""
    period = 2 * math.pi / element.spacing
    n_max = int(np.max(np.abs(element.indices), initial=0))
    width = period / max(4 * n_max, 8)
    val, _ = quadrature.integrate(lambda x: np.abs(element(x)) ** 2, -period / 2, period / 2, tol,
                                  max_width=width)
    return val / period


@dataclass(frozen=True)
class CombIdentity:
    xside: float
    freqside: float
    tail_bound: float
    truncation: int


def poisson_side(phi: TestFunction, spacing: float = 1.0) -> float:
    """``(2 pi / s) sum_m A(2 pi m / s)`` with ``A = phi * conj(phi(-.))``.

    This is the x-side of the comb identity after Poisson summation; ``A`` is
    the autocorrelation, so only finitely many lattice points meet its support.
    """
    if phi.is_zero:
        return 0.0
    a, b = phi.support(1e-17)
    step = 2 * math.pi / spacing
    m_max = int(math.floor((b - a) / step))
    t = step * np.arange(-m_max, m_max + 1)
    vals = autocorrelation(phi, phi, t)
    # pair +m with -m so the sum is real up to rounding and order-independent
    return float(step * np.real(np.sum(vals)))


def comb_norm_identity(phi: TestFunction, comb: DiracComb = DiracComb(truncation=16),
                       tol: float = 1e-10, max_truncation: int = 1 << 20) -> CombIdentity:
    """Both sides of ``integral integral phi(x) conj(phi(y)) f(x - y) = sum_n |phi_hat(n s)|^2``.

    The frequency side starts at the comb's truncation and doubles it until the
    coefficient tail is below ``tol``; the truncation actually used is reported.
    """
    while coefficient_tail(phi, comb) > tol:
        if comb.truncation >= max_truncation:
            raise TailNotCertified(f"coefficient tail not below {tol:.3e} by N={comb.truncation}")
        comb = DiracComb(comb.spacing, max(1, 2 * comb.truncation), comb.regularization)
    el = comb_element(phi, comb)
    return CombIdentity(poisson_side(phi, comb.spacing), periodic_l2_norm(el), el.tail_bound,
                        comb.truncation)


def tempered_sum(N: int) -> tuple[float, float]:
    """Partial sum of ``sum_n 1/(1 + n^2)`` over ``|n| <= N`` and its tail bound ``2/N``."""
    n = np.arange(1, N + 1, dtype=float)
    partial = 1.0 + 2.0 * float(np.sum(1.0 / (1.0 + n[::-1] ** 2)))
    return partial, (2.0 / N if N > 0 else math.inf)
