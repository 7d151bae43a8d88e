"""Spectral measures, positive definite kernels and their Bochner pairing.

Conventions used throughout the package::

    phi_hat(lam) = integral phi(x) exp(i lam x) dx
    f(x)         = integral exp(i x lam) dmu(lam)

so that ``||phi * f||^2 = integral |phi_hat|^2 dmu`` holds with constant 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from . import quadrature
from .errors import (GridTooCoarse, InvalidMeasure, NonConvergent, NotHermitian,
                     TemperedWithoutCutoff)

CATALOG_VERSION = "1"
DEFAULT_TOL = 1e-10
_MAX_CUTOFF = 1e8


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

class Density:
    """Nonnegative spectral density on the line.

    Subclasses provide the pointwise value plus the tail information the
    spectral integrator needs to truncate the real line with a certified error.
    """

    kind = "abstract"
    #: characteristic width, used to size the first quadrature panels
    scale = 1.0
    breakpoints: tuple = ()

    def __call__(self, lam):
        raise NotImplementedError

    @property
    def params(self) -> dict:
        raise NotImplementedError

    def total_mass(self) -> float:
        return self.tail_integral(0.0, 0)

    def tail_integral(self, L: float, p: float) -> float:
        """Exact value of ``integral_{|lam| > L} rho(lam) |lam|^-p dlam`` (may be inf)."""
        raise NotImplementedError

    def envelope(self, L: float, p: float = 0.0) -> float:
        """``sup_{|lam| >= L} rho(lam) |lam|^-p``.

        When finite, ``rho |lam|^-p`` is nonincreasing on ``|lam| >= L``, which is
        what the oscillatory (Dirichlet) tail bounds rely on.
        """
        raise NotImplementedError

    def slope_envelope(self, L: float) -> float:
        """``sup_{|lam| >= L} |rho'(lam)|``, nonincreasing there when finite."""
        return math.inf

    def mirrored(self) -> "Density":
        return self

    @property
    def symmetric(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {k: repr(float(v)) for k, v in self.params.items()}}

    def __eq__(self, other):
        return type(self) is type(other) and self.params == other.params

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({args})"


def _numeric_tail(rho, L, p, center=0.0):
    """Fallback tail integral by QUADPACK on the two half lines."""
    total = 0.0
    for sign in (1.0, -1.0):
        val, _ = sp_integrate.quad(lambda t: rho(sign * t) * t ** (-p), max(L, 1e-300), np.inf,
                                   epsabs=1e-15, epsrel=1e-12, limit=500)
        total += val
    return total


class CauchyDensity(Density):
    """``mass * gamma / (pi (gamma^2 + lam^2))``; Bochner partner of ``mass*exp(-gamma |x|)``."""

    kind = "cauchy"

    def __init__(self, gamma: float = 1.0, mass: float = 1.0):
        self.gamma = float(gamma)
        self.mass = float(mass)
        self.scale = self.gamma

    @property
    def params(self):
        return {"gamma": self.gamma, "mass": self.mass}

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self.mass * self.gamma / (np.pi * (self.gamma ** 2 + lam ** 2))

    def tail_integral(self, L, p):
        g, m = self.gamma, self.mass
        if p == 0:
            return m * (1.0 - 2.0 / np.pi * math.atan(L / g))
        if L == 0:
            return math.inf if p >= 1 else _numeric_tail(self, 0.0, p)
        if p == 2:
            # int_L^inf g / (pi (g^2+t^2) t^2) dt, partial fractions
            return 2 * m / (np.pi * g ** 2) * (g / L - (np.pi / 2 - math.atan(L / g)))
        return _numeric_tail(self, L, p)

    def envelope(self, L, p=0.0):
        return float(self(L)) * L ** -p

    def slope_envelope(self, L):
        return 2 * self.mass * self.gamma / (np.pi * L ** 3)


class GaussianDensity(Density):
    """Normal density with the given mass; partner of ``mass * exp(i c x - s^2 x^2 / 2)``."""

    kind = "gaussian"

    def __init__(self, sigma: float = 1.0, mass: float = 1.0, center: float = 0.0):
        self.sigma = float(sigma)
        self.mass = float(mass)
        self.center = float(center)
        self.scale = self.sigma

    @property
    def params(self):
        return {"sigma": self.sigma, "mass": self.mass, "center": self.center}

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        z = (lam - self.center) / self.sigma
        return self.mass * np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def tail_integral(self, L, p):
        if p == 0:
            s2 = self.sigma * math.sqrt(2)
            return 0.5 * self.mass * (special.erfc((L - self.center) / s2)
                                      + special.erfc((L + self.center) / s2))
        if L == 0 and p >= 1:
            return math.inf
        return _numeric_tail(self, L, p)

    def envelope(self, L, p=0.0):
        d = L - abs(self.center)
        return float(self(self.center + max(d, 0.0))) * L ** -p

    def slope_envelope(self, L):
        d = L - abs(self.center)
        if d < self.sigma:
            return math.inf
        return float(self(self.center + d)) * d / self.sigma ** 2

    def mirrored(self):
        return GaussianDensity(self.sigma, self.mass, -self.center)

    @property
    def symmetric(self):
        return self.center == 0.0


class PowerDensity(Density):
    """``coef * |lam|^exponent``; exponent 0 is Lebesgue measure.

    Infinite total mass: only tempered use (frequency-side pairings, variances).
    """

    kind = "power"

    def __init__(self, exponent: float = 0.0, coef: float = 1.0):
        if exponent <= -1:
            raise InvalidMeasure("power density must be locally integrable (exponent > -1)")
        self.exponent = float(exponent)
        self.coef = float(coef)
        self.breakpoints = (0.0,) if exponent != 0 else ()

    @property
    def params(self):
        return {"exponent": self.exponent, "coef": self.coef}

    def __call__(self, lam):
        lam = np.abs(np.asarray(lam, dtype=float))
        if self.exponent == 0:
            return np.full_like(lam, self.coef)
        with np.errstate(divide="ignore"):
            return self.coef * lam ** self.exponent

    def tail_integral(self, L, p):
        a = self.exponent
        if p <= a + 1:
            return math.inf
        if L == 0:
            return math.inf
        return 2 * self.coef * L ** (a + 1 - p) / (p - a - 1)

    def head_integral(self, L, p):
        """``integral_{|lam| < L} rho |lam|^-p``, finite when p < exponent + 1."""
        a = self.exponent
        if p >= a + 1:
            return math.inf
        return 2 * self.coef * L ** (a + 1 - p) / (a + 1 - p)

    def envelope(self, L, p=0.0):
        if self.exponent > p:
            return math.inf
        return self.coef * L ** (self.exponent - p)

    def slope_envelope(self, L):
        a = self.exponent
        if a > 1:
            return math.inf
        return abs(a) * self.coef * L ** (a - 1)


class DensitySum(Density):
    """Finite sum of densities (used for mirrored, symmetrised inputs)."""

    kind = "sum"

    def __init__(self, parts):
        self.parts = tuple(parts)
        self.scale = min(p.scale for p in self.parts)
        self.breakpoints = tuple(sorted({b for p in self.parts for b in p.breakpoints}))

    @property
    def params(self):
        return {}

    def __call__(self, lam):
        return sum(p(lam) for p in self.parts)

    def tail_integral(self, L, p):
        return sum(q.tail_integral(L, p) for q in self.parts)

    def envelope(self, L, p=0.0):
        return sum(q.envelope(L, p) for q in self.parts)

    def slope_envelope(self, L):
        return sum(q.slope_envelope(L) for q in self.parts)

    def mirrored(self):
        return DensitySum(q.mirrored() for q in self.parts)

    @property
    def symmetric(self):
        return all(q.symmetric for q in self.parts)

    def to_json(self):
        return {"kind": "sum", "parts": [q.to_json() for q in self.parts]}

    def __eq__(self, other):
        return isinstance(other, DensitySum) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)


class ScaledDensity(Density):
    kind = "scaled"

    def __init__(self, base: Density, factor: float):
        self.base = base
        self.factor = float(factor)
        self.scale = base.scale
        self.breakpoints = base.breakpoints

    @property
    def params(self):
        return {"factor": self.factor}

    def __call__(self, lam):
        return self.factor * self.base(lam)

    def tail_integral(self, L, p):
        return self.factor * self.base.tail_integral(L, p)

    def envelope(self, L, p=0.0):
        return self.factor * self.base.envelope(L, p)

    def slope_envelope(self, L):
        return self.factor * self.base.slope_envelope(L)

    def mirrored(self):
        return ScaledDensity(self.base.mirrored(), self.factor)

    @property
    def symmetric(self):
        return self.base.symmetric

    def to_json(self):
        return {"kind": "scaled", "factor": repr(self.factor), "base": self.base.to_json()}

    def __eq__(self, other):
        return isinstance(other, ScaledDensity) and (self.base, self.factor) == (other.base, other.factor)

    def __hash__(self):
        return hash((self.base, self.factor))


_DENSITY_KINDS = {"cauchy": CauchyDensity, "gaussian": GaussianDensity, "power": PowerDensity}


def density_from_json(doc: dict) -> Density:
    kind = doc["kind"]
    if kind == "sum":
        return DensitySum(density_from_json(p) for p in doc["parts"])
    if kind == "scaled":
        return ScaledDensity(density_from_json(doc["base"]), float(doc["factor"]))
    try:
        cls = _DENSITY_KINDS[kind]
    except KeyError:
        raise InvalidMeasure(f"unknown density kind {kind!r}") from None
    return cls(**{k: float(v) for k, v in doc["params"].items()})


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

FINITE = 0


@dataclass(frozen=True)
class SpectralMeasure:
    """Atoms plus an optional density.

    ``growth`` is 0 for a finite measure, otherwise the order M of a tempered
    measure (``integral dmu / (1 + lam^2M) < inf``).
    """

    atoms: tuple = ()
    density: Density | None = None
    growth: int = FINITE

    def __post_init__(self):
        atoms = tuple((float(loc), float(w)) for loc, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        locs = [a for a, _ in atoms]
        if any(w <= 0 for _, w in atoms):
            raise InvalidMeasure("atom weights must be positive")
        if len(set(locs)) != len(locs):
            raise InvalidMeasure("atom locations must be distinct")
        if self.growth < 0:
            raise InvalidMeasure("growth order must be >= 0")
        if self.density is not None:
            probe = np.linspace(-50, 50, 1001) * self.density.scale
            vals = self.density(probe[probe != 0])
            if np.any(vals < 0) or not np.all(np.isfinite(vals)):
                raise InvalidMeasure("density must be finite and nonnegative")
            if self.growth == FINITE and not math.isfinite(self.density.total_mass()):
                raise InvalidMeasure("density has infinite mass; declare a tempered growth order")
            if self.growth > 0:
                m = self.growth
                if not math.isfinite(self.density.tail_integral(1.0, 2 * m)):
                    raise InvalidMeasure(f"density is not tempered of order {m}")

    @property
    def is_finite(self) -> bool:
        return self.growth == FINITE

    @property
    def atom_locations(self) -> np.ndarray:
        return np.array([a for a, _ in self.atoms], dtype=float)

    @property
    def atom_weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def total_mass(self) -> float:
        mass = float(self.atom_weights.sum())
        if self.density is not None:
            mass += self.density.total_mass()
        return mass

    @property
    def symmetric(self) -> bool:
        atoms = {a: w for a, w in self.atoms}
        if any(atoms.get(-a) != w for a, w in atoms.items()):
            return False
        return self.density is None or self.density.symmetric

    def mirrored(self) -> "SpectralMeasure":
        return SpectralMeasure(tuple((-a, w) for a, w in self.atoms),
                               None if self.density is None else self.density.mirrored(),
                               self.growth)

    def symmetrized(self, warn: bool = True) -> "SpectralMeasure":
        """``(mu + mu o (-.)) / 2``; returns self when already symmetric."""
        if self.symmetric:
            return self
        if warn:
            warnings.warn("spectral measure is not symmetric; using its symmetrisation",
                          stacklevel=2)
        merged: dict[float, float] = {}
        for a, w in self.atoms:
            merged[a] = merged.get(a, 0.0) + 0.5 * w
            merged[-a] = merged.get(-a, 0.0) + 0.5 * w
        dens = self.density
        if dens is not None and not dens.symmetric:
            dens = DensitySum([ScaledDensity(dens, 0.5), ScaledDensity(dens.mirrored(), 0.5)])
        return SpectralMeasure(tuple(sorted(merged.items())), dens, self.growth)

    def to_json(self) -> dict:
        return {
            "atoms": [[repr(a), repr(w)] for a, w in self.atoms],
            "density": None if self.density is None else self.density.to_json(),
            "growth_class": "finite" if self.is_finite else f"tempered:{self.growth}",
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SpectralMeasure":
        g = doc.get("growth_class", "finite")
        growth = FINITE if g == "finite" else int(g.split(":")[1])
        dens = doc.get("density")
        return cls(tuple((float(a), float(w)) for a, w in doc.get("atoms", [])),
                   None if dens is None else density_from_json(dens), growth)


def atom(loc: float, weight: float = 1.0) -> SpectralMeasure:
    return SpectralMeasure(((loc, weight),))


def lebesgue(coef: float = 1.0) -> SpectralMeasure:
    return SpectralMeasure(density=PowerDensity(0.0, coef), growth=1)


def fbm_measure(hurst: float) -> SpectralMeasure:
    """``|lam|^(1-2H) dlam``, the spectral measure of fractional Brownian motion."""
    return SpectralMeasure(density=PowerDensity(1.0 - 2.0 * hurst), growth=1)


# ---------------------------------------------------------------------------
# spectral-side integration
# ---------------------------------------------------------------------------

def spectral_integral(measure: SpectralMeasure, g, tol=DEFAULT_TOL, *, tail=None,
                      period=None, cutoff=None, breakpoints=()):
    """``integral g dmu`` over atoms and density.

    ``tail(L)`` must return ``(correction, bound)`` for the density part
    outside [-L, L]: the correction is added, the bound is the certified error.
    Without ``tail`` the density must have finite mass and ``g`` is assumed
    bounded by ``sup |g|`` sampled on the truncated range.  ``cutoff`` forces
    a fixed truncation with no tail (regularised pairing of tempered measures).

    Returns ``(value, error_bound)``.
    """
    value = 0.0 + 0.0j
    if measure.atoms:
        vals = np.asarray(g(measure.atom_locations), dtype=complex)
        value += np.dot(measure.atom_weights, vals)
    err = 0.0
    dens = measure.density
    if dens is not None:
        budget = 0.5 * tol
        if cutoff is not None:
            L, corr, bound = float(cutoff), 0.0, 0.0
        else:
            if tail is None:
                def tail(L):
                    return 0.0, dens.tail_integral(L, 0) * _sup_abs(g, L, dens.scale)
            L = 8.0 * dens.scale
            corr, bound = tail(L)
            while not bound <= budget:
                L *= 2.0
                if L > _MAX_CUTOFF:
                    raise NonConvergent(f"spectral tail not certified below {budget:.2e} "
                                        f"(bound {bound:.2e} at cutoff {L / 2:.3g})")
                corr, bound = tail(L)
        width = 4.0 * dens.scale if period is None else period
        bps = tuple(dens.breakpoints) + tuple(breakpoints)

        def integrand(lam):
            return np.asarray(g(lam)) * dens(lam)

        part, qerr = quadrature.integrate(integrand, -L, L, budget, breakpoints=bps,
                                          max_width=max(width, 2 * L / 20000))
        value += part + corr
        err += qerr + bound
    return value, err


def one_minus_cos_tail(dens: Density, L: float, w: float, p: float = 0.0) -> tuple[float, float]:
    """Tail of ``integral (2 - 2 cos(lam w)) rho(lam) |lam|^(-2-p)`` outside [-L, L].

    Returns ``(correction, bound)``.  The constant part is exact.  The cosine
    part gets the Dirichlet bound ``8 G(L) / |w|`` with ``G = rho |lam|^(-2-p)``,
    or, for symmetric densities, one integration by parts: boundary term
    ``4 sin(L w) G(L) / w`` plus a remainder below ``8 |G'(L)| / w^2``.
    """
    w = abs(float(w))
    if w == 0:
        return 0.0, 0.0
    q = 2.0 + p
    mean = 2.0 * dens.tail_integral(L, q)
    plain = 8.0 * dens.envelope(L, q) / w
    if dens.symmetric:
        dG = dens.slope_envelope(L) * L ** -q + q * dens.envelope(L, q + 1)
        ibp = 8.0 * dG / (w * w)
        if ibp < plain:
            G = float(dens(L)) * L ** -q
            return mean + 4.0 * math.sin(L * w) * G / w, ibp
    return mean, plain


def _sup_abs(g, L, scale):
    probe = np.linspace(L, 4 * L + 10 * scale, 257)
    return float(np.max(np.abs(np.concatenate([np.asarray(g(probe)), np.asarray(g(-probe))]))))


def bochner_eval(measure: SpectralMeasure, x: float, tol: float = DEFAULT_TOL,
                 cutoff: float | None = None) -> complex:
    """``integral exp(i x lam) dmu(lam)`` with absolute error at most ``tol``.

    Tempered measures need an explicit frequency ``cutoff`` (the result is then
    the regularised partial integral).
    """
    x = float(x)
    if not measure.is_finite and cutoff is None:
        raise TemperedWithoutCutoff("pointwise Bochner transform of a tempered measure "
                                    "needs a frequency cutoff")
    dens = measure.density

    def g(lam):
        return np.exp(1j * x * np.asarray(lam))

    def tail(L):
        mass = dens.tail_integral(L, 0)
        if x == 0.0:
            return mass, 0.0
        # Dirichlet test for a monotone density: |int_L^inf e^{ixl} rho| <= 2 rho(L)/|x|
        plain = min(mass, 4.0 * dens.envelope(L) / abs(x))
        if dens.symmetric:
            # one integration by parts: the boundary terms give -2 sin(xL) rho(L) / x,
            # the remainder is a Dirichlet integral of rho'
            slope = 4.0 * dens.slope_envelope(L) / x ** 2
            if slope < plain:
                return -2.0 * math.sin(x * L) * float(dens(L)) / x, slope
        return 0.0, plain

    period = None if x == 0 else 2 * np.pi / abs(x)
    val, err = spectral_integral(measure, g, tol, tail=tail if dens is not None else None,
                                 period=period, cutoff=cutoff)
    if err > tol:
        raise NonConvergent(f"Bochner transform error {err:.3e} exceeds {tol:.3e}")
    return complex(val)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

CONTINUOUS = "continuous"
TEMPERED = "tempered"


class PdKernel:
    """A positive definite function or distribution ``f``."""

    form = "abstract"
    continuity = CONTINUOUS
    breakpoints: tuple = ()

    def __call__(self, x):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


def _cos(x, omega=1.0):
    return np.cos(omega * x)


def _exp_abs(x, a=1.0):
    return np.exp(-a * np.abs(x))


def _gaussian(x, s=1.0):
    return np.exp(-0.5 * (x / s) ** 2)


def _one(x):
    return np.ones_like(x)


_CLOSED_FORMS = {
    # name: (function, breakpoints of the kernel)
    "cos": (_cos, ()),
    "exp_abs": (_exp_abs, (0.0,)),
    "gaussian": (_gaussian, ()),
    "one": (_one, ()),
}


class ClosedFormKernel(PdKernel):
    form = "closed"

    def __init__(self, name: str, **params):
        if name not in _CLOSED_FORMS:
            raise KeyError(f"unknown closed-form kernel {name!r}")
        self.name = name
        self.params = {k: float(v) for k, v in params.items()}
        self._fn, self.breakpoints = _CLOSED_FORMS[name]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self._fn(x, **self.params)

    def to_json(self):
        return {"form": "closed", "name": self.name,
                "params": {k: repr(v) for k, v in self.params.items()},
                "continuity": self.continuity}

    def __eq__(self, other):
        return isinstance(other, ClosedFormKernel) and (self.name, self.params) == (other.name, other.params)

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.params.items()))))

    def __repr__(self):
        return f"ClosedFormKernel({self.name!r}, **{self.params!r})"


class BochnerKernel(PdKernel):
    """``f = mu_hat``; pointwise only for finite measures."""

    form = "bochner"

    def __init__(self, measure: SpectralMeasure, tol: float = DEFAULT_TOL):
        self.measure = measure
        self.tol = tol
        self.continuity = CONTINUOUS if measure.is_finite else TEMPERED

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        uniq, inv = np.unique(x.ravel(), return_inverse=True)
        vals = np.array([bochner_eval(self.measure, u, self.tol) for u in uniq], dtype=complex)
        out = vals[inv].reshape(x.shape)
        if self.measure.symmetric:
            return out.real
        return out

    def to_json(self):
        return {"form": "bochner", "measure": self.measure.to_json(), "continuity": self.continuity}

    def __eq__(self, other):
        return isinstance(other, BochnerKernel) and self.measure == other.measure

    def __hash__(self):
        return hash(self.measure)


class SeriesKernel(PdKernel):
    """Regularised ``sum_k w_k exp(i lam_k x)`` for a discrete tempered measure.

    ``regularization`` is ``"truncate"`` (all w_k = 1) or ``"fejer"``
    (triangular weights ``1 - |k| / (N + 1)`` in frequency order).
    """

    form = "series"
    continuity = TEMPERED

    def __init__(self, frequencies, regularization: str = "fejer"):
        freqs = np.asarray(frequencies, dtype=float)
        if regularization not in ("truncate", "fejer"):
            raise ValueError(f"unknown regularization {regularization!r}")
        self.frequencies = freqs
        self.regularization = regularization

    @property
    def weights(self) -> np.ndarray:
        n = len(self.frequencies)
        if self.regularization == "truncate" or n == 0:
            return np.ones(n)
        # rank of |lam| among the (symmetric) frequency list gives the Fejer index
        order = np.argsort(np.abs(self.frequencies), kind="stable")
        rank = np.empty(n)
        rank[order] = np.arange(n)
        k = np.ceil(rank / 2.0)
        N = k.max()
        return 1.0 - k / (N + 1.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * np.multiply.outer(x, self.frequencies))
        vals = phase @ self.weights
        return vals.real if _is_symmetric_set(self.frequencies) else vals

    def to_json(self):
        return {"form": "series", "frequencies": [repr(float(v)) for v in self.frequencies],
                "regularization": self.regularization, "continuity": self.continuity}


def _is_symmetric_set(freqs) -> bool:
    s = set(np.round(freqs, 12).tolist())
    return all(-v in s for v in s)


class DistributionKernel(PdKernel):
    """Tempered p.d. distribution known only through its spectral measure."""

    form = "distribution"
    continuity = TEMPERED

    def __init__(self, name: str, measure: SpectralMeasure):
        self.name = name
        self.measure = measure

    def __call__(self, x):
        raise TemperedWithoutCutoff(f"{self.name} is a tempered distribution; "
                                    "pair it with test functions instead")

    def to_json(self):
        return {"form": "distribution", "name": self.name, "continuity": self.continuity}


def kernel_from_json(doc: dict) -> PdKernel:
    form = doc["form"]
    if form == "closed":
        return ClosedFormKernel(doc["name"], **{k: float(v) for k, v in doc.get("params", {}).items()})
    if form == "bochner":
        return BochnerKernel(SpectralMeasure.from_json(doc["measure"]))
    if form == "series":
        return SeriesKernel([float(v) for v in doc["frequencies"]], doc["regularization"])
    raise ValueError(f"cannot rebuild kernel of form {form!r} without its measure")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelCatalogEntry:
    name: str
    kernel: PdKernel = field(compare=False)
    measure: SpectralMeasure

    def to_json(self):
        return {"name": self.name, "kernel": self.kernel.to_json(), "measure": self.measure.to_json()}


def _build_catalog():
    two_atom = SpectralMeasure(((-1.0, 0.5), (1.0, 0.5)))
    cauchy = SpectralMeasure(density=CauchyDensity(1.0))
    gauss = SpectralMeasure(density=GaussianDensity(1.0))
    leb = lebesgue()
    fbm = fbm_measure(0.75)
    comb_n = 64
    comb_freqs = np.arange(-comb_n, comb_n + 1, dtype=float)
    comb = SpectralMeasure(tuple((float(n), 1.0) for n in comb_freqs), growth=1)
    entries = [
        KernelCatalogEntry("cos", ClosedFormKernel("cos"), two_atom),
        KernelCatalogEntry("cauchy", ClosedFormKernel("exp_abs"), cauchy),
        KernelCatalogEntry("gaussian", ClosedFormKernel("gaussian"), gauss),
        KernelCatalogEntry("constant", ClosedFormKernel("one"), atom(0.0)),
        KernelCatalogEntry("lebesgue", DistributionKernel("2pi_delta", leb), leb),
        KernelCatalogEntry("fbm", DistributionKernel("fbm_0.75", fbm), fbm),
        KernelCatalogEntry("comb", SeriesKernel(comb_freqs, "fejer"), comb),
    ]
    return {e.name: e for e in entries}


#: pairs exercised by the isometry suite
ISOMETRY_PAIRS = ("cos", "cauchy", "gaussian")


@lru_cache(maxsize=1)
def catalog() -> dict[str, KernelCatalogEntry]:
    """Worked-example registry; continuous pairs are checked against bochner_eval."""
    entries = _build_catalog()
    probe = (0.0, 0.3, 1.0, 2.5)
    for e in entries.values():
        if e.kernel.continuity != CONTINUOUS or not e.measure.is_finite:
            continue
        for x in probe:
            want = complex(np.asarray(e.kernel(x)))
            got = bochner_eval(e.measure, x, 1e-11)
            if abs(want - got) > 1e-9:
                raise InvalidMeasure(f"catalog pair {e.name!r} mismatched at x={x}: {want} vs {got}")
    return entries


def get_pair(name: str) -> KernelCatalogEntry:
    try:
        return catalog()[name]
    except KeyError:
        raise KeyError(f"unknown catalog pair {name!r}; known: {sorted(catalog())}") from None


# ---------------------------------------------------------------------------
# positive definiteness
# ---------------------------------------------------------------------------

def gram_matrix(kernel: PdKernel, points) -> np.ndarray:
    """``G[i, j] = f(x_i - x_j)``, exactly Hermitian as returned."""
    x = np.asarray(points, dtype=float).ravel()
    n = len(x)
    iu = np.triu_indices(n)
    vals = np.asarray(kernel(x[iu[0]] - x[iu[1]]))
    G = np.zeros((n, n), dtype=vals.dtype)
    G[iu] = vals
    G[(iu[1], iu[0])] = np.conj(vals)
    if np.iscomplexobj(G):
        G[np.diag_indices(n)] = G.diagonal().real
    return G


@dataclass(frozen=True)
class PsdReport:
    is_psd: bool
    min_eigenvalue: float


def psd_check(G, rel_tol: float = 1e-10) -> PsdReport:
    """Eigenvalue test: PSD iff ``min eig >= -rel_tol * max(1, max eig)``."""
    G = np.asarray(G)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("Gram matrix must be square")
    if G.size == 0:
        return PsdReport(True, 0.0)
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.conj().T)) > rel_tol * scale:
        raise NotHermitian("matrix is not Hermitian within rel_tol")
    eig = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    lo, hi = float(eig[0]), float(eig[-1])
    return PsdReport(lo >= -rel_tol * max(1.0, hi), lo)


@dataclass(frozen=True)
class QuadGrid:
    """Tensor-product Gauss-Legendre grid for double integrals.

    ``panels`` panels per smooth piece of the test function support, each with
    ``order`` nodes; the value is accepted when doubling ``panels`` changes it
    by at most ``tol`` (relative to ``max(1, |value|)``).
    """

    panels: int = 8
    order: int = 12
    tol: float = 1e-8
    support_tol: float = 1e-16


def _nodes(edges, order):
    x, w = quadrature.gauss_legendre_rule(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    pts = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
    wts = half[:, None] * w[None, :]
    return pts, wts


def _double_form(kernel, phi, edges, order):
    pts, wts = _nodes(edges, order)
    X, W = pts.ravel(), wts.ravel()
    pv = np.asarray(phi(X)) * W
    F = np.asarray(kernel(np.subtract.outer(X, X)))
    total = pv @ F @ np.conj(pv)
    if 0.0 not in kernel.breakpoints:
        return total
    # the kernel kinks on x = y: replace every diagonal square by two
    # collapsed-coordinate triangles so the integrand is smooth on each piece
    u, wu = quadrature.gauss_legendre_rule(order)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    npan, k = pts.shape
    for p in range(npan):
        blk = slice(p * k, (p + 1) * k)
        total -= pv[blk] @ F[blk, blk] @ np.conj(pv[blk])
        a, H = edges[p], edges[p + 1] - edges[p]
        x = a + H * u                                   # outer coordinate
        y = a + np.multiply.outer(x - a, u)             # inner coordinate, y <= x
        jac = H * np.multiply.outer((x - a) * wu, wu)
        fx, fy = np.asarray(phi(x)), np.asarray(phi(y.ravel())).reshape(y.shape)
        diff = np.subtract.outer(x, np.zeros(k)) - y
        lower = np.sum(jac * fx[:, None] * np.conj(fy) * np.asarray(kernel(diff)))
        upper = np.sum(jac * fy * np.conj(fx)[:, None] * np.asarray(kernel(-diff)))
        total += lower + upper
    return total


def pd_quadrature_form(kernel: PdKernel, phi, grid: QuadGrid = QuadGrid()) -> float:
    """``integral integral phi(x) conj(phi(y)) f(x - y) dx dy`` on the x-side.

    Raises GridTooCoarse when one refinement of ``grid`` moves the value by
    more than ``grid.tol``.
    """
    if kernel.continuity != CONTINUOUS:
        raise TemperedWithoutCutoff("x-side double integral needs a continuous kernel")
    if phi.is_zero:
        return 0.0
    a, b = phi.support(grid.support_tol)
    bps = phi.breakpoints()
    values = []
    for n in (grid.panels, 2 * grid.panels):
        base = quadrature.panel_edges(a, b, bps)
        edges = [base[0]]
        for lo, hi in zip(base[:-1], base[1:]):
            edges.extend(np.linspace(lo, hi, n + 1)[1:])
        values.append(_double_form(kernel, phi, np.asarray(edges), grid.order))
    coarse, fine = values
    if abs(coarse - fine) > grid.tol * max(1.0, abs(fine)):
        raise GridTooCoarse(f"refinement changed the double integral by {abs(coarse - fine):.3e}")
    if abs(fine.imag) > 1e-8 * max(1.0, abs(fine)):
        warnings.warn("double integral has a non-negligible imaginary part", stacklevel=2)
    return float(fine.real)


def riemann_form(kernel: PdKernel, phi, n: int) -> float:
    """Discrete p.d. sum with midpoint weights ``c_i = phi(x_i) h`` on n cells."""
    a, b = phi.support(1e-16)
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    c = np.asarray(phi(x)) * h
    G = gram_matrix(kernel, x)
    return float(np.real(c @ G @ np.conj(c)))
