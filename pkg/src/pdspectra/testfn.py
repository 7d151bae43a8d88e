"""Test functions phi with exact (or certified numeric) Fourier transforms.

Every family supports evaluation, ``fourier`` under the convention
``phi_hat(lam) = integral phi(x) exp(i lam x) dx``, translation, and where
possible differentiation inside the family.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite_e import hermeval
from scipy.interpolate import BSpline as _SciBSpline

from . import quadrature
from .errors import NonConvergent, NotDifferentiable
from .spectra import CONTINUOUS, Density, PdKernel, SeriesKernel, one_minus_cos_tail

SERIES_SWITCH = 1e-4

# integral of exp(-1/(1-u^2)) over (-1, 1)
BUMP_MASS = 0.44399381616807943


def _expm1_ratio(z):
    """``(exp(z) - 1) / z`` with the removable singularity handled by series."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < SERIES_SWITCH
    zs = z[small]
    out[small] = 1 + zs / 2 + zs * zs / 6 + zs ** 3 / 24
    zl = z[~small]
    out[~small] = np.expm1(zl) / zl
    return out


class TestFunction:
    """Base class; concrete families below."""

    __test__ = False  # keep pytest from collecting the class by name
    family = "abstract"
    is_zero = False
    differentiable = True

    def __call__(self, x):
        raise NotImplementedError

    def fourier(self, lam):
        raise NotImplementedError

    def support(self, tol: float = 1e-16) -> tuple[float, float]:
        """Interval outside which |phi| integrates to at most ``tol``."""
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return ()

    @property
    def scale(self) -> float:
        a, b = self.support(1e-12)
        return max(b - a, 1e-300)

    def derivative(self) -> "TestFunction":
        raise NotDifferentiable(f"{self.family} is not differentiable")

    def shift(self, t: float) -> "TestFunction":
        """``phi(. - t)``."""
        raise NotImplementedError

    def fourier_bound(self, L: float) -> tuple[float, float]:
        """``(C, q)`` with ``|phi_hat(lam)| <= C |lam|^-q`` for ``|lam| >= L``."""
        raise NotImplementedError

    def sq_tail(self, L: float, density: Density, p: float = 0.0) -> tuple[float, float]:
        """Tail of ``integral |phi_hat|^2 rho |lam|^-p`` outside [-L, L].

        Returns ``(correction, bound)``; the default has no correction and
        bounds the tail by the Fourier envelope.
        """
        C, q = self.fourier_bound(L)
        return 0.0, C * C * density.tail_integral(L, 2 * q + p)

    def l1_norm(self, tol: float = 1e-12) -> float:
        a, b = self.support(tol)
        val, _ = quadrature.integrate(lambda x: np.abs(self(x)), a, b, tol,
                                      breakpoints=self.breakpoints(), max_width=self.scale / 4)
        return val

    def to_json(self) -> dict:
        return {"family": self.family, "params": {k: repr(float(v)) for k, v in self.params.items()}}

    @property
    def params(self) -> dict:
        return {}

    # linear structure
    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __mul__(self, c):
        return LinearCombination([(c, self)])

    __rmul__ = __mul__

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def __eq__(self, other):
        return type(self) is type(other) and self.params == other.params

    def __hash__(self):
        return hash((self.family, tuple(sorted(self.params.items()))))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


class Gaussian(TestFunction):
    """``D^deriv exp(-(x - center)^2 / (2 width^2))``."""

    family = "gaussian"

    def __init__(self, center: float = 0.0, width: float = 1.0, deriv: int = 0):
        self.center = float(center)
        self.width = float(width)
        self.deriv = int(deriv)

    @property
    def params(self):
        return {"center": self.center, "width": self.width, "deriv": self.deriv}

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        m = self.deriv
        coef = np.zeros(m + 1)
        coef[m] = 1.0
        return (-1.0) ** m * self.width ** (-m) * hermeval(u, coef) * np.exp(-0.5 * u * u)

    def fourier(self, lam):
        lam = np.asarray(lam, dtype=float)
        w = self.width
        base = math.sqrt(2 * math.pi) * w * np.exp(1j * lam * self.center - 0.5 * (w * lam) ** 2)
        return (-1j * lam) ** self.deriv * base

    def support(self, tol=1e-16):
        r = math.sqrt(2 * math.log(1.0 / min(tol, 0.5))) + self.deriv + 2.0
        return self.center - r * self.width, self.center + r * self.width

    @property
    def scale(self):
        return self.width

    def derivative(self):
        return Gaussian(self.center, self.width, self.deriv + 1)

    def shift(self, t):
        return Gaussian(self.center + t, self.width, self.deriv)

    def fourier_bound(self, L):
        w, m = self.width, self.deriv
        peak = math.sqrt(m + 2) / w
        lam = max(L, peak)
        return math.sqrt(2 * math.pi) * w * lam ** (m + 2) * math.exp(-0.5 * (w * lam) ** 2), 2.0

    def l1_norm(self, tol=1e-12):
        if self.deriv == 0:
            return math.sqrt(2 * math.pi) * self.width
        return super().l1_norm(tol)


class Indicator(TestFunction):
    """Indicator of [a, b]; not differentiable."""

    family = "indicator"
    differentiable = False

    def __init__(self, a: float = 0.0, b: float = 1.0):
        if b < a:
            raise ValueError("indicator needs a <= b")
        self.a = float(a)
        self.b = float(b)

    @property
    def params(self):
        return {"a": self.a, "b": self.b}

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return ((x >= self.a) & (x < self.b)).astype(float)

    def fourier(self, lam):
        lam = np.asarray(lam, dtype=float)
        w = self.b - self.a
        return np.exp(1j * lam * self.a) * w * _expm1_ratio(1j * lam * w)

    def support(self, tol=1e-16):
        return self.a, self.b

    def breakpoints(self):
        return (self.a, self.b)

    def shift(self, t):
        return Indicator(self.a + t, self.b + t)

    def fourier_bound(self, L):
        return 2.0, 1.0

    def sq_tail(self, L, density, p=0.0):
        # |phi_hat|^2 = (2 - 2 cos(lam w)) / lam^2
        return one_minus_cos_tail(density, L, self.b - self.a, p)

    def l1_norm(self, tol=1e-12):
        return self.b - self.a


@lru_cache(maxsize=None)
def _cardinal_bspline(order: int):
    return _SciBSpline.basis_element(np.arange(order + 2, dtype=float), extrapolate=False)


class BSpline(TestFunction):
    """Unit-mass cardinal B-spline of degree ``order`` on knots ``offset + j*scale``."""

    family = "bspline"

    def __init__(self, order: int = 3, scale: float = 1.0, offset: float = 0.0):
        if order < 0:
            raise ValueError("B-spline order must be >= 0")
        self.order = int(order)
        self.knot_scale = float(scale)
        self.offset = float(offset)
        self.differentiable = self.order >= 1

    @property
    def params(self):
        return {"order": self.order, "scale": self.knot_scale, "offset": self.offset}

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.offset) / self.knot_scale
        vals = _cardinal_bspline(self.order)(u)
        return np.nan_to_num(vals, nan=0.0) / self.knot_scale

    def fourier(self, lam):
        lam = np.asarray(lam, dtype=float)
        h = self.knot_scale
        return np.exp(1j * lam * self.offset) * _expm1_ratio(1j * lam * h) ** (self.order + 1)

    def support(self, tol=1e-16):
        return self.offset, self.offset + (self.order + 1) * self.knot_scale

    def breakpoints(self):
        return tuple(self.offset + j * self.knot_scale for j in range(self.order + 2))

    @property
    def scale(self):
        return self.knot_scale

    def derivative(self):
        if self.order == 0:
            raise NotDifferentiable("order-0 B-spline is an indicator")
        h = self.knot_scale
        lower = BSpline(self.order - 1, h, self.offset)
        return LinearCombination([(1.0 / h, lower), (-1.0 / h, lower.shift(h))])

    def shift(self, t):
        return BSpline(self.order, self.knot_scale, self.offset + t)

    def fourier_bound(self, L):
        return (2.0 / self.knot_scale) ** (self.order + 1), float(self.order + 1)

    def l1_norm(self, tol=1e-12):
        return 1.0


@lru_cache(maxsize=None)
def _bump_poly(m: int) -> Polynomial:
    """Q_m with ``D^m exp(-1/(1-u^2)) = Q_m(u) (1-u^2)^(-2m) exp(-1/(1-u^2))``."""
    q = Polynomial([1.0])
    one_minus = Polynomial([1.0, 0.0, -1.0])
    u = Polynomial([0.0, 1.0])
    for k in range(m):
        q = q.deriv() * one_minus ** 2 + 4 * k * u * one_minus * q - 2 * u * q
    return q


def _bump_unit(u, m=0):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    ui = u[inside]
    s = 1.0 - ui * ui
    out[inside] = _bump_poly(m)(ui) * s ** (-2 * m) * np.exp(-1.0 / s) / BUMP_MASS
    return out


@lru_cache(maxsize=None)
def _bump_unit_l1(m: int) -> float:
    def f(u):
        return np.abs(_bump_unit(u, m))
    rough = float(np.sum(f(np.linspace(-1, 1, 4097)))) * 2 / 4096
    val, err = quadrature.integrate(f, -1.0, 1.0, 1e-12 * max(rough, 1.0), max_width=1 / 64)
    # used as an upper bound, so round up past the quadrature error
    return (val + err) * (1 + 1e-9) if m else val


class Bump(TestFunction):
    """Unit-mass C-infinity bump ``(1/r) b((x - c)/r)`` (or its ``deriv``-th derivative).

    The transform is numeric: the trapezoidal rule on ``samples`` equispaced
    nodes, spectrally accurate because every derivative vanishes at the ends.
    """

    family = "bump"
    samples = 1024

    def __init__(self, center: float = 0.0, radius: float = 1.0, deriv: int = 0):
        if radius <= 0:
            raise ValueError("bump radius must be positive")
        self.center = float(center)
        self.radius = float(radius)
        self.deriv = int(deriv)

    @property
    def params(self):
        return {"center": self.center, "radius": self.radius, "deriv": self.deriv}

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.radius
        return self.radius ** (-1 - self.deriv) * _bump_unit(u, self.deriv)

    def _trapezoid(self, lam, n):
        # the unit bump's m-th derivative has parity (-1)^m, so fold onto u >= 0
        u = 2.0 * np.arange(1, n // 2) / n
        vals = _bump_unit(u, self.deriv) * (4.0 / n) * self.radius ** (-self.deriv)
        v0 = float(_bump_unit(np.zeros(1), self.deriv)[0]) * (2.0 / n) * self.radius ** (-self.deriv)
        lam = np.asarray(lam, dtype=float)
        flat = lam.ravel() * self.radius
        out = np.empty(flat.shape, dtype=complex)
        odd = self.deriv % 2
        for start in range(0, len(flat), 4096):
            arg = np.multiply.outer(flat[start:start + 4096], u)
            if odd:
                out[start:start + 4096] = 1j * (np.sin(arg) @ vals)
            else:
                out[start:start + 4096] = np.cos(arg) @ vals + v0
        return (out * np.exp(1j * lam.ravel() * self.center)).reshape(lam.shape)

    def fourier(self, lam):
        return self._trapezoid(lam, self.samples)

    def fourier_error(self, lam):
        """Difference against the half-resolution rule; an a-posteriori error estimate."""
        return np.abs(self._trapezoid(lam, self.samples) - self._trapezoid(lam, self.samples // 2))

    def fourier_fft(self, n_freq: int | None = None):
        """Transform on the FFT frequency grid ``2 pi k / (n h)``.

        Returns ``(lam, phi_hat)``; the values coincide with :meth:`fourier` at
        those frequencies.
        """
        n = self.samples
        h = 2.0 * self.radius / n
        x = self.center - self.radius + h * np.arange(n)
        vals = self(x) * h
        n_freq = n_freq or n
        spec = np.fft.ifft(vals, n_freq) * n_freq
        k = np.fft.fftfreq(n_freq, d=1.0 / n_freq)
        lam = 2 * np.pi * k / (n_freq * h)
        return lam, spec * np.exp(1j * lam * x[0])

    def support(self, tol=1e-16):
        return self.center - self.radius, self.center + self.radius

    @property
    def scale(self):
        return self.radius

    def derivative(self):
        return Bump(self.center, self.radius, self.deriv + 1)

    def shift(self, t):
        return Bump(self.center + t, self.radius, self.deriv)

    def fourier_bound(self, L):
        # |phi_hat| <= ||D^m phi||_1 / lam^m for every m; take the tightest at L
        best = None
        for m in range(2, max(3, 7 - self.deriv)):
            C = self.radius ** (-m - self.deriv) * _bump_unit_l1(self.deriv + m)
            if best is None or C * L ** -m < best[0] * L ** -best[1]:
                best = (C, float(m))
        return best

    def l1_norm(self, tol=1e-12):
        return self.radius ** (-self.deriv) * _bump_unit_l1(self.deriv)


def mollifier(n: float, x: float = 0.0, radius: float = 1.0) -> Bump:
    """``phi_{n,x}(t) = n phi(n (t - x))`` for the unit-mass bump of the given radius."""
    return Bump(x, radius / n)


class LinearCombination(TestFunction):
    """Finite linear combination ``sum c_k phi_k``."""

    family = "combination"

    def __init__(self, terms=()):
        flat = []
        for c, phi in terms:
            if isinstance(phi, LinearCombination):
                flat.extend((c * c2, p2) for c2, p2 in phi.terms)
            else:
                flat.append((c, phi))
        merged: dict = {}
        for c, phi in flat:
            merged[phi] = merged.get(phi, 0) + c
        self.terms = tuple((complex(c) if np.iscomplexobj(c) else float(c), phi)
                           for phi, c in merged.items() if c != 0)

    @property
    def is_zero(self):
        return not self.terms

    @property
    def differentiable(self):
        return all(p.differentiable for _, p in self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex if any(isinstance(c, complex) for c, _ in self.terms) else float)
        for c, phi in self.terms:
            out = out + c * np.asarray(phi(x))
        return out

    def fourier(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros(lam.shape, dtype=complex)
        for c, phi in self.terms:
            out = out + c * phi.fourier(lam)
        return out

    def support(self, tol=1e-16):
        if not self.terms:
            return 0.0, 0.0
        ivs = [p.support(tol) for _, p in self.terms]
        return min(a for a, _ in ivs), max(b for _, b in ivs)

    def breakpoints(self):
        return tuple(sorted({b for _, p in self.terms for b in p.breakpoints()}))

    @property
    def scale(self):
        return min((p.scale for _, p in self.terms), default=1.0)

    def derivative(self):
        return LinearCombination([(c, p.derivative()) for c, p in self.terms])

    def shift(self, t):
        return LinearCombination([(c, p.shift(t)) for c, p in self.terms])

    def fourier_bound(self, L):
        if not self.terms:
            return 0.0, 1.0
        bounds = [(abs(c), *p.fourier_bound(L)) for c, p in self.terms]
        q = min(b[2] for b in bounds)
        return sum(a * C * L ** (q - qi) for a, C, qi in bounds), q

    def sq_tail(self, L, density, p=0.0):
        if len(self.terms) == 1:
            c, phi = self.terms[0]
            corr, bound = phi.sq_tail(L, density, p)
            return abs(c) ** 2 * corr, abs(c) ** 2 * bound
        return super().sq_tail(L, density, p)

    def l1_norm(self, tol=1e-12):
        if len(self.terms) == 1:
            return abs(self.terms[0][0]) * self.terms[0][1].l1_norm(tol)
        return super().l1_norm(tol)

    @property
    def params(self):
        return {}

    def to_json(self):
        return {"family": self.family,
                "terms": [[_coef_json(c), p.to_json()] for c, p in self.terms]}

    def __eq__(self, other):
        return isinstance(other, LinearCombination) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"LinearCombination({list(self.terms)!r})"


ZERO = LinearCombination(())


class Convolution(TestFunction):
    """``first * second``; transform is the product, values by quadrature."""

    family = "convolution"

    def __init__(self, first: TestFunction, second: TestFunction):
        self.first = first
        self.second = second

    @property
    def is_zero(self):
        return self.first.is_zero or self.second.is_zero

    @property
    def differentiable(self):
        return self.first.differentiable or self.second.differentiable

    def __call__(self, x, tol=1e-12):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        a, b = self.second.support(1e-16)
        bps = self.second.breakpoints()
        out = np.empty(x.shape, dtype=complex)
        for i, xi in enumerate(x.ravel()):
            shifted = tuple(xi - p for p in self.first.breakpoints())
            val, _ = quadrature.integrate(lambda y: self.first(xi - y) * self.second(y), a, b, tol,
                                          breakpoints=bps + shifted, max_width=self.second.scale / 2)
            out.ravel()[i] = val
        return out.real if not np.iscomplexobj(out) or np.all(out.imag == 0) else out

    def fourier(self, lam):
        return self.first.fourier(lam) * self.second.fourier(lam)

    def support(self, tol=1e-16):
        a1, b1 = self.first.support(tol)
        a2, b2 = self.second.support(tol)
        return a1 + a2, b1 + b2

    def breakpoints(self):
        return tuple(sorted({p + q for p in self.first.breakpoints() for q in self.second.breakpoints()}))

    @property
    def scale(self):
        return max(self.first.scale, self.second.scale)

    def derivative(self):
        if self.first.differentiable:
            return Convolution(self.first.derivative(), self.second)
        return Convolution(self.first, self.second.derivative())

    def shift(self, t):
        return Convolution(self.first.shift(t), self.second)

    def fourier_bound(self, L):
        c1, q1 = self.first.fourier_bound(L)
        c2, q2 = self.second.fourier_bound(L)
        return c1 * c2, q1 + q2

    def to_json(self):
        return {"family": self.family, "factors": [self.first.to_json(), self.second.to_json()]}

    def __eq__(self, other):
        return isinstance(other, Convolution) and (self.first, self.second) == (other.first, other.second)

    def __hash__(self):
        return hash((self.first, self.second))

    def __repr__(self):
        return f"Convolution({self.first!r}, {self.second!r})"


def convolve(phi: TestFunction, psi: TestFunction) -> TestFunction:
    """``phi * psi`` in closed form where the family allows it."""
    if phi.is_zero or psi.is_zero:
        return ZERO
    if isinstance(phi, Gaussian) and isinstance(psi, Gaussian) and phi.deriv == psi.deriv == 0:
        w = math.hypot(phi.width, psi.width)
        amp = 2 * math.pi * phi.width * psi.width / (math.sqrt(2 * math.pi) * w)
        return LinearCombination([(amp, Gaussian(phi.center + psi.center, w))])
    return Convolution(phi, psi)


def _coef_json(c):
    c = complex(c)
    return [repr(c.real), repr(c.imag)]


_FAMILIES = {"gaussian": Gaussian, "indicator": Indicator, "bspline": BSpline, "bump": Bump}


def from_json(doc: dict) -> TestFunction:
    fam = doc["family"]
    if fam == "combination":
        terms = []
        for (re, im), sub in doc["terms"]:
            c = complex(float(re), float(im))
            terms.append((c.real if c.imag == 0 else c, from_json(sub)))
        return LinearCombination(terms)
    if fam == "convolution":
        a, b = doc["factors"]
        return Convolution(from_json(a), from_json(b))
    cls = _FAMILIES[fam]
    params = {k: float(v) for k, v in doc["params"].items()}
    for key in ("deriv", "order"):
        if key in params:
            params[key] = int(params[key])
    return cls(**params)


def catalog() -> dict[str, TestFunction]:
    """Named test functions used by the verification suites and the CLI."""
    return {
        "gaussian": Gaussian(0.0, 1.0),
        "indicator": Indicator(0.0, 1.0),
        "bspline3": BSpline(3, 1.0, 0.0),
        "bump": Bump(0.0, 1.0),
        "zero": ZERO,
    }


DIFFERENTIABLE = ("gaussian", "bspline3", "bump")


def fourier(phi: TestFunction):
    """The transform of ``phi`` as a callable of frequency."""
    return phi.fourier


def derivative(phi: TestFunction) -> TestFunction:
    return phi.derivative()


def convolve_kernel(phi: TestFunction, kernel: PdKernel, x, tol: float = 1e-10):
    """``f_phi(x) = integral phi(y) f(x - y) dy``.

    Continuous kernels are integrated on the x-side.  Series kernels use the
    frequency-side sum ``sum_k w_k exp(i lam_k x) phi_hat(-lam_k)``; for the
    un-regularised (truncated) series the neglected tail must be below ``tol``.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if phi.is_zero:
        out = np.zeros(xs.shape)
    elif isinstance(kernel, SeriesKernel):
        lam = kernel.frequencies
        coef = kernel.weights * phi.fourier(-lam)
        out = np.exp(1j * np.multiply.outer(xs, lam)) @ coef
        if kernel.regularization == "truncate" and len(lam):
            N = np.max(np.abs(lam))
            C, q = phi.fourier_bound(N)
            tail = math.inf if q <= 1 else 2 * C * N ** (1 - q) / (q - 1)
            if tail > tol:
                raise NonConvergent(f"series tail bound {tail:.3e} exceeds {tol:.3e}")
    elif kernel.continuity == CONTINUOUS:
        a, b = phi.support(tol * 1e-3)
        out = np.empty(xs.shape, dtype=complex)
        for i, xi in enumerate(xs):
            bps = tuple(phi.breakpoints()) + tuple(xi - c for c in kernel.breakpoints)
            val, _ = quadrature.integrate(lambda y: phi(y) * kernel(xi - y), a, b, tol,
                                          breakpoints=bps, max_width=phi.scale / 2)
            out[i] = val
    else:
        raise NonConvergent("tempered kernels only pair with test functions on the frequency side")
    out = np.asarray(out)
    if np.iscomplexobj(out) and np.all(np.abs(out.imag) <= 1e-14 * np.maximum(1, np.abs(out.real))):
        out = out.real
    return out[0] if np.ndim(x) == 0 else out
