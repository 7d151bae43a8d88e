"""The RKHS H_f realised through elements ``phi * f``.

Norms are computed two independent ways: the x-side double integral
``integral integral phi(x) conj(psi(y)) f(x - y) dx dy`` and the frequency side
``integral phi_hat conj(psi_hat) dmu``.  Tempered kernels only admit the
frequency side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import quadrature
from .errors import (DegenerateConfig, KernelMismatch, MeasureMismatch, NonConvergent,
                     NotDifferentiable)
from .spectra import (CONTINUOUS, DEFAULT_TOL, KernelCatalogEntry, PdKernel, SpectralMeasure,
                      bochner_eval, gram_matrix, spectral_integral)
from .testfn import TestFunction, convolve, convolve_kernel, mollifier


@dataclass(frozen=True)
class RkhsElement:
    """The element ``phi * f`` of H_f, with f given through its catalog pair."""

    phi: TestFunction
    pair: KernelCatalogEntry

    @property
    def kernel(self) -> PdKernel:
        return self.pair.kernel

    @property
    def measure(self) -> SpectralMeasure:
        return self.pair.measure

    def __sub__(self, other: "RkhsElement") -> "RkhsElement":
        _same_kernel(self, other)
        return RkhsElement(self.phi - other.phi, self.pair)

    def __add__(self, other: "RkhsElement") -> "RkhsElement":
        _same_kernel(self, other)
        return RkhsElement(self.phi + other.phi, self.pair)


def _same_kernel(x, y):
    if x.pair.name != y.pair.name:
        raise KernelMismatch(f"elements live in different spaces ({x.pair.name} vs {y.pair.name})")


# ---------------------------------------------------------------------------
# x-side
# ---------------------------------------------------------------------------

def autocorrelation(phi, psi, s, order=16):
    """``C(s) = integral phi(y + s) conj(psi(y)) dy`` for an array of shifts."""
    s = np.asarray(s, dtype=float)
    a1, b1 = phi.support(1e-17)
    a2, b2 = psi.support(1e-17)
    lo = np.maximum(a2, a1 - s)
    hi = np.minimum(b2, b1 - s)
    bp_psi = np.asarray(psi.breakpoints(), dtype=float)
    bp_phi = np.asarray(phi.breakpoints(), dtype=float)
    # per-shift sorted cut points, clipped into [lo, hi]
    cuts = np.concatenate([np.broadcast_to(bp_psi, (len(s), len(bp_psi))),
                           bp_phi[None, :] - s[:, None],
                           lo[:, None], hi[:, None]], axis=1)
    cuts = np.sort(np.clip(cuts, lo[:, None], hi[:, None]), axis=1)
    step = min(phi.scale, psi.scale) / 2
    widest = float(np.max(np.diff(cuts, axis=1), initial=0.0))
    sub = max(1, int(math.ceil(widest / step)))
    prev = out = _fixed_pieces(phi, psi, s, cuts, sub, order)
    # refine the inner rule until two resolutions agree
    while sub < 1024:
        sub *= 2
        out = _fixed_pieces(phi, psi, s, cuts, sub, order)
        if np.max(np.abs(out - prev), initial=0.0) <= 1e-14 * max(1.0, float(np.max(np.abs(out)))):
            break
        prev = out
    return np.where(hi > lo, out, 0.0)


def _fixed_pieces(phi, psi, s, cuts, sub, order):
    x, w = quadrature.gauss_legendre_rule(order)
    left, right = cuts[:, :-1], cuts[:, 1:]
    frac = np.linspace(0.0, 1.0, sub + 1)
    p_lo = left[..., None] + (right - left)[..., None] * frac[None, None, :-1]
    p_hi = left[..., None] + (right - left)[..., None] * frac[None, None, 1:]
    half = 0.5 * (p_hi - p_lo)
    nodes = (0.5 * (p_hi + p_lo))[..., None] + half[..., None] * x
    weights = half[..., None] * w
    shifted = nodes + s[:, None, None, None]
    vals = np.asarray(phi(shifted.ravel())).reshape(nodes.shape) * \
        np.conj(np.asarray(psi(nodes.ravel())).reshape(nodes.shape))
    return (vals * weights).reshape(len(s), -1).sum(axis=1)


def _x_side(phi, psi, kernel, tol):
    if phi.is_zero or psi.is_zero:
        return 0.0, 0.0
    a1, b1 = phi.support(1e-17)
    a2, b2 = psi.support(1e-17)
    s_lo, s_hi = a1 - b2, b1 - a2
    bps = {p - q for p in phi.breakpoints() for q in psi.breakpoints()}
    bps |= set(kernel.breakpoints)

    def integrand(s):
        return np.asarray(kernel(s)) * autocorrelation(phi, psi, s)

    return quadrature.integrate(integrand, s_lo, s_hi, tol, breakpoints=sorted(bps),
                                max_width=min(phi.scale, psi.scale))


# ---------------------------------------------------------------------------
# frequency side
# ---------------------------------------------------------------------------

def _freq_side(phi, psi, measure, tol):
    if phi.is_zero or psi.is_zero:
        return 0.0, 0.0
    dens = measure.density

    def g(lam):
        return phi.fourier(lam) * np.conj(psi.fourier(lam))

    tail = None
    if dens is not None:
        if phi == psi:
            def tail(L):
                return phi.sq_tail(L, dens)
        else:
            def tail(L):
                c1, b1 = phi.sq_tail(L, dens)
                c2, b2 = psi.sq_tail(L, dens)
                return 0.0, math.sqrt((abs(c1) + b1) * (abs(c2) + b2))
    width = min(phi.support(1e-12)[1] - phi.support(1e-12)[0],
                psi.support(1e-12)[1] - psi.support(1e-12)[0])
    period = 2 * math.pi / width if width > 0 else None
    return spectral_integral(measure, g, tol, tail=tail, period=period)


def spectral_energy(phi: TestFunction, measure: SpectralMeasure, tol: float = DEFAULT_TOL) -> float:
    """``integral |phi_hat|^2 dmu`` for any finite or tempered measure."""
    val, err = _freq_side(phi, phi, measure, tol)
    if err > tol:
        raise NonConvergent(f"spectral energy error {err:.3e} exceeds {tol:.3e}")
    return float(np.real(val))


def _check_partner(pair: KernelCatalogEntry, mu: SpectralMeasure):
    if mu == pair.measure:
        return
    if pair.kernel.continuity == CONTINUOUS and mu.is_finite:
        for x in (0.0, 0.5, 1.3):
            if abs(complex(np.asarray(pair.kernel(x))) - bochner_eval(mu, x, 1e-9)) > 1e-7:
                break
        else:
            return
    raise MeasureMismatch(f"measure is not the Bochner partner of pair {pair.name!r}")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def inner_product_double(x: RkhsElement, y: RkhsElement, tol: float = DEFAULT_TOL) -> complex:
    """``<f_phi, f_psi>`` from the double integral (linear in the first slot).

    Tempered kernels are paired on the frequency side instead.
    """
    _same_kernel(x, y)
    if x.kernel.continuity == CONTINUOUS:
        val, _ = _x_side(x.phi, y.phi, x.kernel, tol)
    else:
        val, _ = _freq_side(x.phi, y.phi, x.measure, tol)
    return complex(val)


def norm_double_integral(x: RkhsElement, tol: float = DEFAULT_TOL) -> float:
    """Squared norm ``||phi * f||^2`` from the double integral."""
    val = inner_product_double(x, x, tol)
    if abs(val.imag) > max(tol, 1e-12 * abs(val.real)):
        raise NonConvergent(f"squared norm has imaginary part {val.imag:.3e}")
    return val.real


def inner_product_spectral(x: RkhsElement, y: RkhsElement, tol: float = DEFAULT_TOL) -> complex:
    _same_kernel(x, y)
    val, _ = _freq_side(x.phi, y.phi, x.measure, tol)
    return complex(val)


def norm_spectral(x: RkhsElement, mu: SpectralMeasure | None = None, tol: float = DEFAULT_TOL) -> float:
    """Squared norm ``integral |phi_hat|^2 dmu``."""
    if mu is None:
        mu = x.measure
    else:
        _check_partner(x.pair, mu)
    return spectral_energy(x.phi, mu, tol)


@dataclass(frozen=True)
class IsometryReport:
    lhs: float
    rhs: float
    rel_err: float


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def verify_isometry(phi: TestFunction, pair: KernelCatalogEntry, tol: float = 1e-11) -> IsometryReport:
    """Compare ``||phi * f||^2`` (double integral) with ``integral |phi_hat|^2 dmu``."""
    el = RkhsElement(phi, pair)
    lhs = norm_double_integral(el, tol / 2)
    rhs = norm_spectral(el, tol=tol / 2)
    return IsometryReport(lhs, rhs, _rel(lhs, rhs))


@dataclass(frozen=True)
class ReproducingReport:
    lhs: complex
    rhs: complex
    diff: float


def reproducing_check(kernel: PdKernel, x0: float, psi: TestFunction, tol: float = 1e-10,
                      mollifier_n: float | None = None, pair: KernelCatalogEntry | None = None):
    """Both sides of the reproducing identity ``<f_psi, f(. - x0)> = f_psi(x0)``.

    The right side is ``convolve_kernel``.  The left side is the pairing of
    ``psi`` against ``f(. - x0)``, i.e. ``integral psi(y) f(y - x0) dy``; with
    ``mollifier_n`` (and ``pair``) it is instead the H_f inner product against the
    mollified element ``phi_{n, x0} * f``.  For the symmetric spectral measures
    of the catalog f is real and even, and the two sides agree.
    """
    if kernel.continuity != CONTINUOUS:
        raise NonConvergent("the pointwise reproducing property needs a continuous kernel")
    rhs = complex(convolve_kernel(psi, kernel, x0, tol))
    if psi.is_zero:
        lhs = 0j
    elif mollifier_n is not None:
        if pair is None:
            raise ValueError("mollified reproducing check needs the catalog pair")
        lhs = inner_product_double(RkhsElement(psi, pair),
                                   RkhsElement(mollifier(mollifier_n, x0), pair), tol)
    else:
        a, b = psi.support(tol * 1e-3)
        bps = tuple(psi.breakpoints()) + tuple(x0 + c for c in kernel.breakpoints)
        lhs, _ = quadrature.integrate(lambda y: psi(y) * kernel(y - x0), a, b, tol,
                                      breakpoints=bps, max_width=psi.scale / 3)
        lhs = complex(lhs)
    return ReproducingReport(lhs, rhs, abs(lhs - rhs))


def factorization_check(pair: KernelCatalogEntry, x1: float, x2: float,
                        ns=(4, 16, 64, 256), radius: float = 1.0, tol: float = 1e-11):
    """``<f_{phi_{n,x1}}, f_{phi_{n,x2}}>`` for each n against ``f(x1 - x2)``.

    Returns a list of ``(n, value, abs_error)``.
    """
    target = complex(np.asarray(pair.kernel(x1 - x2)))
    out = []
    for n in ns:
        a = RkhsElement(mollifier(n, x1, radius), pair)
        b = RkhsElement(mollifier(n, x2, radius), pair)
        val = inner_product_spectral(a, b, tol)
        out.append((n, val, abs(val - target)))
    return out


def mollifier_distance(pair: KernelCatalogEntry, x0: float, n: float, radius: float = 1.0,
                       tol: float = 1e-12) -> float:
    """``||phi_{n,x0} * f - f(. - x0)||`` in H_f.

    Expanded as ``||f_phi||^2 - 2 Re <f_phi, f(.-x0)> + f(0)`` where the last
    term is the factorization identity ``||f(. - x0)||^2 = f(0)``; the first two
    terms are computed on the frequency side.
    """
    mu = pair.measure
    if not mu.is_finite:
        raise NonConvergent("f(. - x0) is an element of H_f only for finite measures")
    phi = mollifier(n, x0, radius)
    nsq = norm_spectral(RkhsElement(phi, pair), tol=tol)
    dens = mu.density

    def g(lam):
        return phi.fourier(lam) * np.exp(-1j * lam * x0)

    def tail(L):
        c, b = phi.sq_tail(L, dens)
        return 0.0, math.sqrt((abs(c) + b) * dens.tail_integral(L, 0))

    a, b = phi.support()
    cross, _ = spectral_integral(mu, g, tol, tail=tail if dens is not None else None,
                                 period=2 * math.pi / (b - a))
    f0 = mu.total_mass()
    return math.sqrt(max(nsq - 2 * cross.real + f0, 0.0))


@dataclass(frozen=True)
class MembershipEstimate:
    A0_estimate: float
    witness: tuple  # (points, coefficients)
    skipped: int
    evaluated: int


def _halton_coeffs(m: int, count: int) -> np.ndarray:
    sampler = qmc.Halton(d=2 * m, scramble=False)
    raw = sampler.random(count + 1)[1:]          # first Halton point is the origin
    z = 2.0 * raw - 1.0
    return z[:, :m] + 1j * z[:, m:]


def membership_bound(kernel: PdKernel, xi, radius: float = 1.0, sizes=(2, 4, 8),
                     n_coeffs: int = 64, tol: float = 1e-12) -> MembershipEstimate:
    """Sampled lower bound for the constant A0 in ``|sum c_i xi(x_i)|^2 <= A0 c^T G conj(c)``.

    Configurations are uniform grids of the given sizes on ``[-radius, radius]``
    and their half-step shifts; coefficients come from an unscrambled Halton
    sequence, plus the Rayleigh-optimal vector for each point set.  Configs
    whose right-hand side falls below ``tol`` are skipped and counted.  This
    bounds A0 from below; it does not certify membership.
    """
    best, witness, skipped, seen = 0.0, None, 0, 0
    for m in sizes:
        grid = np.linspace(-radius, radius, m)
        step = 2 * radius / max(m - 1, 1)
        for pts in (grid, np.clip(grid + step / 2, -radius, radius)):
            if len(np.unique(pts)) < len(pts):
                continue
            G = gram_matrix(kernel, pts)
            v = np.asarray(xi(pts), dtype=complex)
            cands = list(_halton_coeffs(m, n_coeffs))
            try:
                cands.append(np.linalg.solve(G.T, np.conj(v)))
            except np.linalg.LinAlgError:
                pass
            for c in cands:
                rhs = float(np.real(c @ G @ np.conj(c)))
                seen += 1
                if rhs < tol:
                    skipped += 1
                    continue
                ratio = abs(np.dot(c, v)) ** 2 / rhs
                if ratio > best:
                    best, witness = ratio, (pts.copy(), c.copy())
    if seen == skipped:
        raise DegenerateConfig("every sampled configuration was degenerate")
    return MembershipEstimate(best, witness, skipped, seen)


def membership_scan(kernel: PdKernel, xi, radii=(1.0, 10.0, 100.0), **kw):
    """Estimates over growing ranges; ``diverging`` flags non-member evidence."""
    est = [membership_bound(kernel, xi, r, **kw).A0_estimate for r in radii]
    growing = all(b > 2.0 * a for a, b in zip(est, est[1:])) and est[0] > 0
    return {"radii": list(radii), "estimates": est, "diverging": growing}


@dataclass(frozen=True)
class SobolevReport:
    lhs: float
    rhs: float
    rel_err: float


def sobolev_identity(phi: TestFunction, pair: KernelCatalogEntry, tol: float = 1e-12) -> SobolevReport:
    """``integral (|phi_hat|^2 + |(D phi)^|^2) dmu / (1 + lam^2)`` against ``integral |phi_hat|^2 dmu``."""
    if phi.is_zero:
        return SobolevReport(0.0, 0.0, 0.0)
    if not phi.differentiable:
        raise NotDifferentiable(f"{phi!r} has no derivative in its family")
    dphi = phi.derivative()
    mu = pair.measure
    dens = mu.density

    def g(lam):
        return (np.abs(phi.fourier(lam)) ** 2 + np.abs(dphi.fourier(lam)) ** 2) / (1.0 + lam * lam)

    def tail(L):
        c1, b1 = phi.sq_tail(L, dens, 2.0)
        c2, b2 = dphi.sq_tail(L, dens, 2.0)
        return 0.0, abs(c1) + b1 + abs(c2) + b2

    a, b = phi.support(1e-12)
    lhs, _ = spectral_integral(mu, g, tol, tail=tail if dens is not None else None,
                               period=2 * math.pi / (b - a))
    rhs = norm_spectral(RkhsElement(phi, pair), tol=tol)
    lhs = float(np.real(lhs))
    return SobolevReport(lhs, rhs, _rel(lhs, rhs))


def translate(x: RkhsElement, t: float) -> RkhsElement:
    """``U_t(phi * f) = phi(. - t) * f``; multiplies phi_hat by ``exp(i t lam)``."""
    if t == 0:
        return x
    return RkhsElement(x.phi.shift(t), x.pair)


def norm(x: RkhsElement, tol: float = DEFAULT_TOL) -> float:
    """H_f norm (not squared), frequency side."""
    if x.phi.is_zero:
        return 0.0
    return math.sqrt(max(norm_spectral(x, tol=tol), 0.0))


def distance(x: RkhsElement, y: RkhsElement, tol: float = DEFAULT_TOL) -> float:
    return norm(x - y, tol)


def convolve_element(phi: TestFunction, x: RkhsElement) -> RkhsElement:
    """``phi * h`` for ``h = x``; satisfies ``||phi * h|| <= ||phi||_1 ||h||``."""
    return RkhsElement(convolve(phi, x.phi), x.pair)
