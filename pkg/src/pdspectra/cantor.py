"""Self-similar (IFS) measures, their transforms, and spectral-pair checks.

An :class:`IfsMeasure` is the invariant probability measure of the maps
``x -> (x + d) / R``, ``d`` in the digit set.  Its transform is the infinite
product ``nu_hat(xi) = prod_{k >= 0} m(xi / R^(k+1))`` with
``m(t) = mean_d exp(i t d)``, truncated at depth K with a first-order tail.

Two frequency units appear.  :func:`nu_hat` takes angular frequency ``xi``.
The exponentials ``e_lam(x) = exp(2 pi i lam x)`` used by :func:`onb_gram`,
:func:`max_orth_search` and :func:`parseval_check` take ``lam`` in cycles, so
the integer set Lambda_4 is a spectrum for the quarter Cantor measure.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from .errors import DepthInsufficient, GridTooLarge

_EPS = np.finfo(float).eps
MAX_GRID = 200


@dataclass(frozen=True)
class IfsMeasure:
    scale: int = 4
    digits: tuple = (0, 2)
    depth: int = 60

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 2:
            raise ValueError("scale must be an integer >= 2")
        if len(self.digits) == 0 or len(set(self.digits)) != len(self.digits):
            raise ValueError("digits must be a non-empty set of distinct integers")
        if self.depth < 1:
            raise ValueError("product depth must be positive")
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))

    @property
    def mean(self) -> float:
        """First moment ``integral x dnu``."""
        return float(np.mean(self.digits)) / (self.scale - 1)

    @property
    def hull(self) -> tuple[float, float]:
        """Convex hull of the attractor."""
        return min(self.digits) / (self.scale - 1), max(self.digits) / (self.scale - 1)

    def factor(self, t):
        """``m(t) = mean_d exp(i t d)``."""
        t = np.asarray(t, dtype=float)
        return np.mean(np.exp(1j * np.multiply.outer(t, np.asarray(self.digits, dtype=float))), axis=-1)


def nu4(depth: int = 60) -> IfsMeasure:
    return IfsMeasure(4, (0, 2), depth)


def nu3(depth: int = 60) -> IfsMeasure:
    return IfsMeasure(3, (0, 2), depth)


def _tail_error(m: IfsMeasure, eta):
    # |nu_hat(eta) - 1 - i mean eta| <= E[x^2] eta^2 / 2 <= max|x|^2 eta^2 / 2
    xmax = max(abs(v) for v in m.hull)
    return 0.5 * (xmax * eta) ** 2


def nu_hat_with_error(m: IfsMeasure, xi, tol: float = 1e-14):
    """``(nu_hat(xi), error_bound)`` for angular frequencies ``xi`` (array or scalar).

    Raises DepthInsufficient if the tail approximation cannot meet ``tol``.
    """
    xi = np.asarray(xi, dtype=float)
    R, K = m.scale, m.depth
    eta = xi / float(R) ** K
    err = _tail_error(m, np.abs(eta))
    if np.any(err > tol):
        raise DepthInsufficient(f"depth {K} leaves tail error {float(np.max(err)):.3e} > {tol:.3e}")
    out = 1.0 + 1j * m.mean * eta
    zero = np.zeros(xi.shape, dtype=bool)
    two = len(m.digits) == 2
    gap = abs(m.digits[1] - m.digits[0]) if two else 0
    for k in range(K):
        t = xi / float(R) ** (k + 1)
        out = out * m.factor(t)
        if two:
            # the factor vanishes exactly when t * gap is an odd multiple of pi
            q = t * gap / math.pi
            odd = np.round(q)
            zero |= (np.abs(q - odd) <= 8 * _EPS * np.maximum(np.abs(q), 1.0)) & (np.mod(odd, 2) == 1)
    out = np.where(zero, 0.0, out)
    # rounding: each factor contributes a few ulps
    err = np.where(zero, 0.0, err + 4 * K * _EPS)
    if out.ndim == 0:
        return complex(out), float(err)
    return out, err


def nu_hat(m: IfsMeasure, xi, tol: float = 1e-14):
    """Fourier transform ``integral exp(i xi x) dnu(x)`` at angular frequency ``xi``."""
    return nu_hat_with_error(m, xi, tol)[0]


def _frac_part(q: Fraction) -> Fraction:
    return q - (q.numerator // q.denominator)


def nu_hat_cycles(m: IfsMeasure, lam) -> complex:
    """``nu_hat(2 pi lam)`` with the phases reduced exactly.

    ``lam`` is converted to a Fraction (floats convert exactly), phases
    ``lam d / R^(k+1)`` are reduced mod 1 before rounding, and factor zeros are
    detected in exact arithmetic, so orthogonality shows up as an exact 0.
    """
    q = Fraction(lam)
    R, K = m.scale, m.depth
    two = len(m.digits) == 2
    gap = abs(m.digits[1] - m.digits[0]) if two else 0
    out = 1.0 + 0j
    for k in range(K):
        scaled = q / R ** (k + 1)
        if two:
            # m(2 pi s) = 0  iff  2 s gap is an odd integer
            z = 2 * scaled * gap
            if z.denominator == 1 and z.numerator % 2 == 1:
                return 0j
        acc = 0j
        for d in m.digits:
            acc += complex(np.exp(2j * math.pi * float(_frac_part(scaled * d))))
        out *= acc / len(m.digits)
    eta = 2 * math.pi * float(q / R ** K)
    return out * (1.0 + 1j * m.mean * eta)


def refinement_residual(m: IfsMeasure, xi) -> np.ndarray:
    """``|nu_hat(xi) - m(xi / R) nu_hat(xi / R)|``."""
    xi = np.asarray(xi, dtype=float)
    return np.abs(nu_hat(m, xi) - m.factor(xi / m.scale) * nu_hat(m, xi / m.scale))


def spectrum(max_terms: int, base: int = 4, digits=(0, 1)) -> list[int]:
    """All sums ``sum_{j < J} b_j base^j`` with ``b_j`` in ``digits``, sorted."""
    if max_terms < 0 or max_terms > 20:
        raise ValueError("max_terms must lie in [0, 20]")
    vals = {0}
    for j in range(max_terms):
        vals = {v + b * base ** j for v in vals for b in digits}
    return sorted(vals)


def lambda4(max_terms: int) -> list[int]:
    """``{sum_{j<J} b_j 4^j : b_j in {0, 1}}`` in increasing order."""
    return spectrum(max_terms, 4, (0, 1))


def onb_gram(m: IfsMeasure, freqs) -> np.ndarray:
    """``G[i, j] = <e_{lam_i}, e_{lam_j}>`` in ``L^2(nu)``, taken as ``nu_hat(2 pi (lam_j - lam_i))``.

    Frequencies are in cycles; the matrix is Hermitian by construction.
    """
    freqs = [Fraction(f) for f in freqs]
    n = len(freqs)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        G[i, i] = 1.0
        for j in range(i + 1, n):
            v = nu_hat_cycles(m, freqs[j] - freqs[i])
            G[i, j] = v
            G[j, i] = np.conj(v)
    return G


@dataclass(frozen=True)
class OrthSearchResult:
    max_size: int
    witness: tuple
    grid_size: int
    eps: float
    note: str = "evidence, not proof"


def max_orth_search(m: IfsMeasure, grid, eps: float = 1e-3) -> OrthSearchResult:
    """Largest subset of ``grid`` (cycles) with ``|nu_hat(2 pi (lam_i - lam_j))| <= eps`` pairwise.

    Exact maximum clique of the eps-orthogonality graph.  A finite grid says
    nothing about frequencies off the grid, so the result is evidence only.
    """
    pts = sorted({Fraction(g) for g in grid})
    if len(pts) > MAX_GRID:
        raise GridTooLarge(f"grid has {len(pts)} points; the exact clique search is limited to {MAX_GRID}")
    if not pts:
        return OrthSearchResult(0, (), 0, eps)
    cache = {}
    graph = nx.Graph()
    graph.add_nodes_from(range(len(pts)))
    for i, j in itertools.combinations(range(len(pts)), 2):
        d = pts[j] - pts[i]
        if d not in cache:
            cache[d] = abs(nu_hat_cycles(m, d))
        if cache[d] <= eps:
            graph.add_edge(i, j)
    clique, size = nx.max_weight_clique(graph, weight=None)
    witness = tuple(float(pts[i]) for i in sorted(clique))
    return OrthSearchResult(int(size), witness, len(pts), eps)


def _cylinder_points(m: IfsMeasure, depth: int) -> np.ndarray:
    """Barycentres of the depth-K cylinders, one per digit word."""
    R = m.scale
    pts = np.zeros(1)
    digits = np.asarray(m.digits, dtype=float)
    for k in range(1, depth + 1):
        pts = (pts[:, None] + digits[None, :] / float(R) ** k).ravel()
    return pts + m.mean / float(R) ** depth


def ifs_integrate(m: IfsMeasure, h, depth: int = 12, lipschitz: float | None = None,
                  tol: float | None = None):
    """``integral h dnu`` as the equal-weight average of ``h`` over depth-K cylinder barycentres.

    With ``lipschitz`` given the error bound ``lipschitz * diam(cylinder)`` is
    returned alongside the value, and checked against ``tol`` if that is set.
    """
    if depth < 0 or len(m.digits) ** depth > 1 << 24:
        raise ValueError("depth out of range for word enumeration")
    pts = _cylinder_points(m, depth)
    vals = np.asarray(h(pts))
    value = complex(np.mean(vals)) if np.iscomplexobj(vals) else float(np.mean(vals))
    if lipschitz is None:
        return value
    lo, hi = m.hull
    err = lipschitz * (hi - lo) / float(m.scale) ** depth
    if tol is not None and err > tol:
        raise DepthInsufficient(f"depth {depth} gives error bound {err:.3e} > {tol:.3e}")
    return value, err


@dataclass(frozen=True)
class ParsevalReport:
    rkhs_side: float
    l2_side: float


def parseval_check(coefficients, freqs, m: IfsMeasure | None = None, depth: int = 12) -> ParsevalReport:
    """``integral |sum c_lam e_lam|^2 dnu`` against ``sum |c_lam|^2``.

    The right side is the H_f norm for ``f = sum_{lam} e_lam`` with spectral
    measure ``sum_lam delta_lam``; equality is the isometry between that space and
    ``L^2(nu)`` when the frequencies form a spectrum.
    """
    m = m or nu4()
    c = np.asarray(coefficients, dtype=complex)
    lam = np.asarray([float(f) for f in freqs])
    if c.shape != lam.shape:
        raise ValueError("one coefficient per frequency")

    def h(x):
        s = np.exp(2j * math.pi * np.multiply.outer(x, lam)) @ c
        return np.abs(s) ** 2

    return ParsevalReport(float(np.sum(np.abs(c) ** 2)), float(ifs_integrate(m, h, depth)))
