"""Stationary-increment Gaussian processes attached to a tempered spectral measure.

The process has ``X_0 = 0``, mean zero and variance
``r(x) = integral |1 - exp(i lam x)|^2 dmu(lam) / lam^2``; covariances follow
from ``E(X_x X_y) = (r(x) + r(y) - r(x - y)) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import FactorizationFailure, InvalidMeasure, NonConvergent
from .rkhs import spectral_energy
from .spectra import SpectralMeasure, one_minus_cos_tail, spectral_integral
from .testfn import TestFunction

SERIES_SWITCH = 1e-4
CLIP = 1e-12
CLIP_BUDGET = 1e-8
BLOCK = 8192


def increment_mass(measure: SpectralMeasure) -> float:
    """``integral min(1, lam^-2) dmu``; finite exactly when r is well defined."""
    total = 0.0
    for lam, w in measure.atoms:
        total += w * min(1.0, lam ** -2 if lam else 1.0)
    dens = measure.density
    if dens is not None:
        if hasattr(dens, "head_integral"):
            head = dens.head_integral(1.0, 0.0)
        else:
            head, _ = quadrature.integrate(dens, -1.0, 1.0, 1e-12, breakpoints=dens.breakpoints)
        total += head + dens.tail_integral(1.0, 2.0)
    return total


def _validated(measure: SpectralMeasure) -> SpectralMeasure:
    if not math.isfinite(increment_mass(measure)):
        raise InvalidMeasure("integral of min(1, 1/lam^2) dmu diverges; no variance function")
    return measure.symmetrized(warn=True)


def _one_minus_cos_ratio(lam, x):
    """``|1 - exp(i lam x)|^2 / lam^2`` written as ``4 sin^2(lam x / 2) / lam^2``."""
    lam = np.asarray(lam, dtype=float)
    u = lam * x
    small = np.abs(u) < SERIES_SWITCH
    out = np.empty_like(lam)
    us = u[small]
    out[small] = x * x * (1.0 - us * us / 12.0)
    ls = lam[~small]
    out[~small] = (2.0 * np.sin(0.5 * ls * x) / ls) ** 2
    return out


def variance_r(measure: SpectralMeasure, x: float, tol: float = 1e-10) -> float:
    """``r(x) = integral |1 - exp(i lam x)|^2 dmu(lam) / lam^2``, even in x."""
    x = abs(float(x))
    if x == 0.0:
        return 0.0
    if not math.isfinite(increment_mass(measure)):
        raise InvalidMeasure("integral of min(1, 1/lam^2) dmu diverges; no variance function")
    dens = measure.density

    def tail(L):
        return one_minus_cos_tail(dens, L, x)

    val, err = spectral_integral(measure, lambda lam: _one_minus_cos_ratio(lam, x), tol,
                                 tail=tail if dens is not None else None,
                                 period=2 * math.pi / x, breakpoints=(0.0,))
    if err > tol:
        raise NonConvergent(f"variance integral error {err:.3e} exceeds {tol:.3e}")
    return float(np.real(val))


def covariance(measure: SpectralMeasure, x: float, y: float, tol: float = 1e-10) -> float:
    """``E(X_x X_y) = (r(|x|) + r(|y|) - r(|x - y|)) / 2``."""
    return 0.5 * (variance_r(measure, x, tol) + variance_r(measure, y, tol)
                  - variance_r(measure, x - y, tol))


def covariance_matrix(measure: SpectralMeasure, grid, tol: float = 1e-10) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    need = np.unique(np.abs(np.concatenate([grid, np.subtract.outer(grid, grid).ravel()])))
    r = {float(v): variance_r(measure, v, tol) for v in need}
    rx = np.array([r[abs(float(v))] for v in grid])
    rd = np.vectorize(lambda d: r[abs(float(d))])(np.subtract.outer(grid, grid))
    C = 0.5 * (rx[:, None] + rx[None, :] - rd)
    return 0.5 * (C + C.T)


@dataclass(frozen=True)
class GpModel:
    measure: SpectralMeasure
    grid: tuple
    seed: int = 0
    tol: float = 1e-10
    _cov: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        grid = tuple(float(g) for g in self.grid)
        if 0.0 not in grid:
            raise ValueError("the grid must contain 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "measure", _validated(self.measure))

    @property
    def covariance(self) -> np.ndarray:
        if self._cov is None:
            object.__setattr__(self, "_cov", covariance_matrix(self.measure, self.grid, self.tol))
        return self._cov


def _factor(C: np.ndarray) -> np.ndarray:
    """``A`` with ``A A^T = C`` from the eigendecomposition, negative eigenvalues clipped."""
    ev, V = np.linalg.eigh(C)
    trace = float(np.trace(C))
    neg = ev < 0
    if np.any(ev < -CLIP * max(1.0, trace)):
        clipped = float(-ev[neg].sum())
        if clipped > CLIP_BUDGET * max(trace, 0.0):
            raise FactorizationFailure(f"covariance has negative mass {clipped:.3e} "
                                       f"> {CLIP_BUDGET:g} * trace")
    ev = np.where(neg, 0.0, ev)
    A = V * np.sqrt(ev)[None, :]
    A[np.diag(C) == 0.0] = 0.0
    return A


def sample_paths(model: GpModel, n_paths: int) -> np.ndarray:
    """``n_paths x len(grid)`` zero-mean samples with the model covariance.

    Paths are drawn in blocks of 8192, each from its own child of
    ``SeedSequence(seed)``, so the output depends only on the seed.
    """
    d = len(model.grid)
    if n_paths <= 0:
        return np.zeros((0, d))
    A = _factor(model.covariance)
    n_blocks = -(-n_paths // BLOCK)
    children = np.random.SeedSequence(model.seed).spawn(n_blocks)
    out = np.empty((n_paths, d))
    for b, ss in enumerate(children):
        lo = b * BLOCK
        hi = min(n_paths, lo + BLOCK)
        z = np.random.default_rng(ss).standard_normal((hi - lo, d))
        out[lo:hi] = z @ A.T
    return out


@dataclass(frozen=True)
class MomentCheck:
    name: str
    x: float
    y: float
    empirical: float
    predicted: float
    std_error: float

    @property
    def z_score(self) -> float:
        return abs(self.empirical - self.predicted) / self.std_error if self.std_error else 0.0


def moment_checks(model: GpModel, paths: np.ndarray, pairs=None) -> list[MomentCheck]:
    """Empirical variance, cross moment and increment variance against the formulas.

    Standard errors use the Gaussian fourth moments of the model.  ``pairs``
    defaults to consecutive grid points.
    """
    grid = model.grid
    C = model.covariance
    n = len(paths)
    if pairs is None:
        pairs = [(i, i + 1) for i in range(len(grid) - 1)]
    out = []
    for i, j in pairs:
        xi, xj = paths[:, i], paths[:, j]
        sii, sjj, sij = C[i, i], C[j, j], C[i, j]
        out.append(MomentCheck("var", grid[j], grid[j], float(np.mean(xj * xj)), sjj,
                               math.sqrt(2.0 / n) * sjj))
        out.append(MomentCheck("cov", grid[i], grid[j], float(np.mean(xi * xj)), sij,
                               math.sqrt((sii * sjj + sij * sij) / n)))
        inc = sii + sjj - 2 * sij
        out.append(MomentCheck("increment", grid[i], grid[j], float(np.mean((xj - xi) ** 2)), inc,
                               math.sqrt(2.0 / n) * inc))
    return out


@dataclass(frozen=True)
class CharacteristicReport:
    empirical: complex
    predicted: float
    variance: float
    n_samples: int

    @property
    def error(self) -> float:
        return abs(self.empirical - self.predicted)


def characteristic_functional_check(measure: SpectralMeasure, phi: TestFunction, n_samples: int,
                                    seed: int = 0, tol: float = 1e-10) -> CharacteristicReport:
    """Compare ``E exp(i <phi, X>)`` with ``exp(-integral |phi_hat|^2 dmu / 2)``.

    The pairing ``<phi, X>`` is drawn from its exact law, a centred normal with
    variance ``integral |phi_hat|^2 dmu``.
    """
    s2 = 0.0 if phi.is_zero else spectral_energy(phi, measure, tol)
    predicted = math.exp(-0.5 * s2)
    if n_samples <= 0:
        return CharacteristicReport(complex(predicted), predicted, s2, 0)
    z = np.random.default_rng(np.random.SeedSequence(seed)).normal(0.0, math.sqrt(s2), n_samples)
    return CharacteristicReport(complex(np.mean(np.exp(1j * z))), predicted, s2, n_samples)
