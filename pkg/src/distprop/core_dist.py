"""Parametric distributions, transforms and change-of-variables densities.

Every distribution exposes ``pdf``, ``cdf`` and ``icdf`` that accept scalars
or arrays.  Scalars in give floats out.

The module-level functions (:func:`pdf`, :func:`cdf`, :func:`icdf`,
:func:`expectation`, :func:`pushforward_density`) are thin wrappers kept so
that pipelines can be written without method calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Sequence

import numba
import numpy as np
from scipy import integrate, special

from .errors import (
    ArgumentError,
    DomainError,
    NumericalError,
    SingularityError,
    UnsupportedTransformError,
)

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

Monotonicity = Literal["increasing", "decreasing", "non-monotone"]


def _out(x, values):
    """Return a float for scalar input, an array otherwise."""
    if np.ndim(x) == 0:
        return float(values)
    return values


def _check_unit_interval(u):
    u = np.asarray(u, dtype=float)
    if not np.all((u > 0.0) & (u < 1.0)):
        raise DomainError("icdf is defined for u strictly inside (0, 1)")
    return u


class ParametricDist:
    """Closed-form univariate distribution."""

    #: short identifier used in provenance records and configs
    kind: str = "abstract"

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def icdf(self, u):
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def discrete(self) -> bool:
        return False

    def effective_range(self, eps: float = 1e-15) -> tuple[float, float]:
        """Interval holding all but ``2 * eps`` of the probability mass."""
        lo, hi = self.support
        if not math.isfinite(lo):
            lo = self.icdf(eps)
        if not math.isfinite(hi):
            hi = self.icdf(1.0 - eps)
        return float(lo), float(hi)

    def _quad_bounds(self) -> tuple[float, float]:
        return self.effective_range(1e-18)

    def _quad_points(self) -> list[float]:
        return []

    @property
    def id(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Uniform(ParametricDist):
    lower: float
    upper: float
    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)) or not self.lower < self.upper:
            raise ArgumentError(f"Uniform needs finite lower < upper, got ({self.lower}, {self.upper})")

    @property
    def support(self):
        return (self.lower, self.upper)

    @property
    def mean(self):
        return 0.5 * (self.lower + self.upper)

    def pdf(self, x):
        x_ = np.asarray(x, dtype=float)
        inside = (x_ >= self.lower) & (x_ <= self.upper)
        return _out(x, np.where(inside, 1.0 / (self.upper - self.lower), 0.0))

    def cdf(self, x):
        x_ = np.asarray(x, dtype=float)
        return _out(x, np.clip((x_ - self.lower) / (self.upper - self.lower), 0.0, 1.0))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        return _out(u, self.lower + u_ * (self.upper - self.lower))

    @property
    def id(self):
        return f"uniform({self.lower:g},{self.upper:g})"


@dataclass(frozen=True)
class Gaussian(ParametricDist):
    mu: float
    sigma: float
    kind = "gaussian"

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise ArgumentError(f"Gaussian needs finite mu and sigma > 0, got ({self.mu}, {self.sigma})")

    @property
    def mean(self):
        return self.mu

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return _out(x, np.exp(-0.5 * z * z) / (self.sigma * SQRT2PI))

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return _out(x, special.ndtr(z))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        return _out(u, self.mu + self.sigma * special.ndtri(u_))

    def _quad_bounds(self):
        return (self.mu - 40 * self.sigma, self.mu + 40 * self.sigma)

    def _quad_points(self):
        return [self.mu]

    @property
    def id(self):
        return f"gaussian({self.mu:g},{self.sigma:g})"


@numba.njit(cache=True)
def _mixture_cdf_scalar(x, w, mu, sd):
    total = 0.0
    for k in range(w.shape[0]):
        total += w[k] * 0.5 * math.erfc(-(x - mu[k]) / (sd[k] * 1.4142135623730951))
    return total


@numba.njit(cache=True)
def _mixture_pdf_scalar(x, w, mu, sd):
    total = 0.0
    for k in range(w.shape[0]):
        z = (x - mu[k]) / sd[k]
        total += w[k] * math.exp(-0.5 * z * z) / (sd[k] * 2.5066282746310002)
    return total


@numba.njit(cache=True)
def _mixture_icdf_kernel(u, w, mu, sd, max_iter):
    """Safeguarded Newton on a bisection bracket, one root per entry of ``u``."""
    out = np.empty(u.shape[0])
    lo0 = np.min(mu - 12.0 * sd)
    hi0 = np.max(mu + 12.0 * sd)
    width = hi0 - lo0
    for i in range(u.shape[0]):
        target = u[i]
        lo = lo0
        hi = hi0
        while _mixture_cdf_scalar(lo, w, mu, sd) > target:
            lo -= width
        while _mixture_cdf_scalar(hi, w, mu, sd) < target:
            hi += width
        x = 0.5 * (lo + hi)
        for _ in range(max_iter):
            f = _mixture_cdf_scalar(x, w, mu, sd) - target
            if f == 0.0:
                break
            if f < 0.0:
                lo = x
            else:
                hi = x
            d = _mixture_pdf_scalar(x, w, mu, sd)
            step_ok = False
            if d > 0.0:
                xn = x - f / d
                if lo < xn < hi:
                    step_ok = True
            if not step_ok:
                xn = 0.5 * (lo + hi)
            if abs(xn - x) <= 1e-15 * (1.0 + abs(x)) or hi - lo <= 1e-15 * (1.0 + abs(x)):
                x = xn
                break
            x = xn
        out[i] = x
    return out


@dataclass(frozen=True)
class GaussianMixture(ParametricDist):
    """Finite mixture of Gaussians given as ``(weight, mean, std)`` triples."""

    components: tuple[tuple[float, float, float], ...]
    kind = "mixture"

    def __post_init__(self):
        comps = tuple(tuple(float(v) for v in c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ArgumentError("GaussianMixture needs at least one component")
        for w, m, s in comps:
            if not w > 0:
                raise ArgumentError(f"mixture weight must be > 0, got {w}")
            if not (s > 0 and math.isfinite(s) and math.isfinite(m)):
                raise ArgumentError(f"mixture component needs finite mean and std > 0, got ({m}, {s})")
        total = math.fsum(w for w, _, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ArgumentError(f"mixture weights must sum to 1, got {total!r}")

    @cached_property
    def _arrays(self):
        a = np.array(self.components, dtype=float)
        return a[:, 0].copy(), a[:, 1].copy(), a[:, 2].copy()

    @property
    def weights(self):
        return self._arrays[0]

    @property
    def means(self):
        return self._arrays[1]

    @property
    def stds(self):
        return self._arrays[2]

    @property
    def mean(self):
        return math.fsum(w * m for w, m, _ in self.components)

    def component_pdfs(self, x):
        """Weighted component densities, shape ``(n_components,) + shape(x)``."""
        w, mu, sd = self._arrays
        x_ = np.asarray(x, dtype=float)[..., None]
        z = (x_ - mu) / sd
        dens = w * np.exp(-0.5 * z * z) / (sd * SQRT2PI)
        return np.moveaxis(dens, -1, 0)

    def pdf(self, x):
        return _out(x, self.component_pdfs(x).sum(axis=0))

    def cdf(self, x):
        w, mu, sd = self._arrays
        x_ = np.asarray(x, dtype=float)[..., None]
        return _out(x, (w * special.ndtr((x_ - mu) / sd)).sum(axis=-1))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        w, mu, sd = self._arrays
        flat = np.ascontiguousarray(u_.reshape(-1))
        x = _mixture_icdf_kernel(flat, w, mu, sd, 200).reshape(u_.shape)
        return _out(u, x)

    def _quad_bounds(self):
        w, mu, sd = self._arrays
        return (float(np.min(mu - 40 * sd)), float(np.max(mu + 40 * sd)))

    def _quad_points(self):
        return sorted(set(float(m) for m in self.means))

    @property
    def id(self):
        inner = ";".join(f"{w:g}:{m:g}:{s:g}" for w, m, s in self.components)
        return f"mixture({inner})"


@dataclass(frozen=True)
class Bernoulli(ParametricDist):
    """Two-point distribution on {0, 1}; ``pdf`` is the probability mass function."""

    p: float
    kind = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ArgumentError(f"Bernoulli p must lie in [0, 1], got {self.p}")

    @property
    def support(self):
        return (0.0, 1.0)

    @property
    def discrete(self):
        return True

    @property
    def mean(self):
        return self.p

    def pdf(self, x):
        x_ = np.asarray(x, dtype=float)
        return _out(x, np.where(x_ == 1.0, self.p, np.where(x_ == 0.0, 1.0 - self.p, 0.0)))

    def cdf(self, x):
        x_ = np.asarray(x, dtype=float)
        return _out(x, np.where(x_ < 0.0, 0.0, np.where(x_ < 1.0, 1.0 - self.p, 1.0)))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        return _out(u, np.where(u_ <= 1.0 - self.p, 0.0, 1.0))

    @property
    def id(self):
        return f"bernoulli({self.p:g})"


@dataclass(frozen=True)
class LogNormal(ParametricDist):
    """exp of a Gaussian(mu, sigma); used as a heavy-tailed generator target."""

    mu: float
    sigma: float
    kind = "lognormal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ArgumentError(f"LogNormal needs sigma > 0, got {self.sigma}")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def pdf(self, x):
        x_ = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(x_) - self.mu) / self.sigma
            dens = np.exp(-0.5 * z * z) / (x_ * self.sigma * SQRT2PI)
        return _out(x, np.where(x_ > 0, dens, 0.0))

    def cdf(self, x):
        x_ = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            c = special.ndtr((np.log(np.maximum(x_, 0.0)) - self.mu) / self.sigma)
        return _out(x, np.where(x_ > 0, c, 0.0))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        return _out(u, np.exp(self.mu + self.sigma * special.ndtri(u_)))

    def _quad_points(self):
        return [math.exp(self.mu)]

    @property
    def id(self):
        return f"lognormal({self.mu:g},{self.sigma:g})"


@dataclass(frozen=True)
class Exponential(ParametricDist):
    rate: float
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ArgumentError(f"Exponential needs rate > 0, got {self.rate}")

    @property
    def support(self):
        return (0.0, math.inf)

    @property
    def mean(self):
        return 1.0 / self.rate

    def pdf(self, x):
        x_ = np.asarray(x, dtype=float)
        return _out(x, np.where(x_ >= 0, self.rate * np.exp(-self.rate * np.maximum(x_, 0.0)), 0.0))

    def cdf(self, x):
        x_ = np.asarray(x, dtype=float)
        return _out(x, np.where(x_ > 0, -np.expm1(-self.rate * np.maximum(x_, 0.0)), 0.0))

    def icdf(self, u):
        u_ = _check_unit_interval(u)
        return _out(u, -np.log1p(-u_) / self.rate)

    @property
    def id(self):
        return f"exponential({self.rate:g})"


# The input of the convergence challenge: a bimodal two-component mixture.
CHALLENGE_INPUT = GaussianMixture(((0.6, 2.0, 0.5), (0.4, -1.0, 1.0)))


def pdf(dist: ParametricDist, x):
    return dist.pdf(x)


def cdf(dist: ParametricDist, x):
    return dist.cdf(x)


def icdf(dist: ParametricDist, u):
    return dist.icdf(u)


# --------------------------------------------------------------------------- transforms


@dataclass(frozen=True)
class Transform:
    """A univariate map with optional analytic inverse and derivative.

    All callables must accept numpy arrays.
    """

    forward: Callable
    inverse: Callable | None = None
    derivative: Callable | None = None
    monotonicity: Monotonicity = "non-monotone"
    name: str = "f"

    def __call__(self, x):
        return self.forward(x)

    @property
    def monotone(self) -> bool:
        return self.monotonicity in ("increasing", "decreasing")


def identity() -> Transform:
    return Transform(
        forward=lambda x: x,
        inverse=lambda y: y,
        derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        monotonicity="increasing",
        name="identity",
    )


def affine(a: float, b: float) -> Transform:
    """x -> a*x + b."""
    if a == 0:
        return Transform(lambda x: a * np.asarray(x, dtype=float) + b, name=f"affine({a:g},{b:g})")
    return Transform(
        forward=lambda x: a * x + b,
        inverse=lambda y: (y - b) / a,
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), a),
        monotonicity="increasing" if a > 0 else "decreasing",
        name=f"affine({a:g},{b:g})",
    )


def power(k: int) -> Transform:
    """x -> x**k.  Monotone (with an inverse) only for odd k; even k is left non-monotone."""
    k = int(k)
    if k % 2 == 1:
        return Transform(
            forward=lambda x: np.asarray(x, dtype=float) ** k,
            inverse=lambda y: np.sign(y) * np.abs(y) ** (1.0 / k),
            derivative=lambda x: k * np.asarray(x, dtype=float) ** (k - 1),
            monotonicity="increasing",
            name=f"pow{k}",
        )
    return Transform(
        forward=lambda x: np.asarray(x, dtype=float) ** k,
        derivative=lambda x: k * np.asarray(x, dtype=float) ** (k - 1),
        name=f"pow{k}",
    )


def positive_power(k: float) -> Transform:
    """x -> x**k restricted to x > 0, where it is increasing for k > 0."""
    return Transform(
        forward=lambda x: np.asarray(x, dtype=float) ** k,
        inverse=lambda y: np.asarray(y, dtype=float) ** (1.0 / k),
        derivative=lambda x: k * np.asarray(x, dtype=float) ** (k - 1),
        monotonicity="increasing" if k > 0 else "decreasing",
        name=f"pospow{k:g}",
    )


def reciprocal() -> Transform:
    """x -> 1/x on x > 0."""
    return Transform(
        forward=lambda x: 1.0 / np.asarray(x, dtype=float),
        inverse=lambda y: 1.0 / np.asarray(y, dtype=float),
        derivative=lambda x: -1.0 / np.asarray(x, dtype=float) ** 2,
        monotonicity="decreasing",
        name="reciprocal",
    )


def exp_transform() -> Transform:
    return Transform(
        forward=np.exp,
        inverse=np.log,
        derivative=np.exp,
        monotonicity="increasing",
        name="exp",
    )


def sigmoid_transform(center: float = 1.0) -> Transform:
    """Logistic sigmoid 1 / (1 + exp(-(x - center))) with its logit inverse."""

    def forward(x):
        return special.expit(np.asarray(x, dtype=float) - center)

    def inverse(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return center + np.log(y / (1.0 - y))

    def derivative(x):
        s = special.expit(np.asarray(x, dtype=float) - center)
        return s * (1.0 - s)

    return Transform(forward, inverse, derivative, "increasing", name="sigmoid")


def poiseuille_flow(dp, mu, length, radius):
    """Laminar volumetric flow pi * r**4 * dP / (8 * mu * l).

    With dP in mPa, mu in mPa*s and lengths in cm the result is in cm^3/s.
    """
    return math.pi * radius**4 * dp / (8.0 * mu * length)


def poiseuille_transforms() -> dict[str, Transform]:
    """Unary pieces of the flow law, as used when building its expression graph."""
    return {
        "radius_pow4": positive_power(4),
        "reciprocal": reciprocal(),
        "scale_pi_over_8": affine(math.pi / 8.0, 0.0),
    }


# ---------------------------------------------------------------------- expectations


def expectation(dist: ParametricDist, g: Transform | Callable | None = None, abs_tol: float = 1e-9) -> float:
    """E[g(X)] as the integral of g(x) p(x) dx (adaptive Gauss-Kronrod)."""
    fn = (lambda x: x) if g is None else g
    if dist.discrete:
        xs = np.array([0.0, 1.0])
        return float(np.sum(np.asarray(fn(xs), dtype=float) * dist.pdf(xs)))

    lo, hi = dist._quad_bounds()
    pts = [p for p in dist._quad_points() if lo < p < hi] or None

    def integrand(x):
        return float(fn(np.float64(x))) * float(dist.pdf(x))

    return _adaptive_quad(integrand, lo, hi, pts, abs_tol)


def _adaptive_quad(fn, lo, hi, points=None, abs_tol=1e-9):
    res = integrate.quad(fn, lo, hi, points=points, epsabs=abs_tol, epsrel=1e-12, limit=10_000, full_output=1)
    value, err = res[0], res[1]
    if len(res) > 3 and err > abs_tol:
        raise NumericalError(f"quadrature did not converge: {res[3]}", residual=err)
    return float(value)


# ---------------------------------------------------------------- analytic densities

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class AnalyticDensity:
    """An evaluable density on an open interval.

    ``cdf`` and ``icdf`` are built from the density alone: Gauss-Legendre
    masses on a tanh-graded grid over ``table_range``, then Newton with a
    bracketing fallback for the inverse.
    """

    def __init__(self, density: Callable, support: tuple[float, float], table_range=None, points=(), name="p_Y"):
        self._density = density
        self.support = (float(support[0]), float(support[1]))
        if table_range is None:
            table_range = self.support
        if not all(math.isfinite(v) for v in table_range):
            raise ArgumentError("an AnalyticDensity needs a finite table_range for cdf/icdf")
        self.table_range = (float(table_range[0]), float(table_range[1]))
        self.points = tuple(float(p) for p in points)
        self.name = name

    def pdf(self, y):
        y_ = np.asarray(y, dtype=float)
        lo, hi = self.support
        inside = (y_ > lo) & (y_ < hi)
        out = np.zeros(y_.shape)
        if np.any(inside):
            out[inside] = self._density(y_[inside])
        return _out(y, out)

    __call__ = pdf

    def integrate(self, fn: Callable | None = None, abs_tol: float = 1e-10) -> float:
        """Integral of fn(y) p(y) over the support (fn defaults to 1)."""
        lo, hi = self.support
        if not math.isfinite(lo) or not math.isfinite(hi):
            lo, hi = self.table_range
        pts = [p for p in self.points if lo < p < hi] or None
        if fn is None:
            integrand = lambda y: float(self.pdf(y))  # noqa: E731
        else:
            integrand = lambda y: float(fn(y)) * float(self.pdf(y))  # noqa: E731
        return _adaptive_quad(integrand, lo, hi, pts, abs_tol)

    @property
    def mean(self) -> float:
        return self.integrate(lambda y: y)

    @property
    def id(self) -> str:
        return self.name

    @cached_property
    def _table(self):
        lo, hi = self.table_range
        t = np.tanh(np.linspace(-6.0, 6.0, 8193))
        nodes = lo + (hi - lo) * 0.5 * (1.0 + t)
        nodes[0], nodes[-1] = lo, hi
        nodes = np.unique(nodes)
        a, b = nodes[:-1], nodes[1:]
        half = 0.5 * (b - a)
        xs = (a + b)[:, None] * 0.5 + half[:, None] * _GL_X
        masses = (self.pdf(xs) * _GL_W).sum(axis=1) * half
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        return nodes, cum

    def _partial(self, a, b):
        half = 0.5 * (b - a)
        xs = (a + b)[..., None] * 0.5 + half[..., None] * _GL_X
        return (self.pdf(xs) * _GL_W).sum(axis=-1) * half

    def cdf(self, y):
        nodes, cum = self._table
        y_ = np.clip(np.asarray(y, dtype=float), nodes[0], nodes[-1])
        i = np.clip(np.searchsorted(nodes, y_, side="right") - 1, 0, len(nodes) - 2)
        return _out(y, cum[i] + self._partial(nodes[i], y_))

    def icdf(self, u, tol: float = 1e-14, max_iter: int = 60):
        u_ = _check_unit_interval(u)
        nodes, cum = self._table
        flat = u_.reshape(-1)
        i = np.clip(np.searchsorted(cum, flat, side="right") - 1, 0, len(nodes) - 2)
        start = nodes[i]
        lo, hi = start.copy(), nodes[i + 1].copy()
        base = cum[i]
        span = cum[i + 1] - cum[i]
        frac = np.where(span > 0, (flat - base) / np.where(span > 0, span, 1.0), 0.5)
        y = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
        active = np.ones(flat.shape, dtype=bool)
        for _ in range(max_iter):
            f = base[active] + self._partial(start[active], y[active]) - flat[active]
            ya, la, ha = y[active], lo[active], hi[active]
            la = np.where(f < 0, ya, la)
            ha = np.where(f > 0, ya, ha)
            d = self.pdf(ya)
            with np.errstate(divide="ignore", invalid="ignore"):
                yn = ya - f / d
            bad = ~((yn > la) & (yn < ha)) | ~np.isfinite(yn)
            yn = np.where(bad, 0.5 * (la + ha), yn)
            done = (np.abs(f) <= tol) | (np.abs(yn - ya) <= 1e-15 * (1.0 + np.abs(ya)))
            idx = np.flatnonzero(active)
            y[idx] = np.where(np.abs(f) <= tol, ya, yn)
            lo[idx], hi[idx] = la, ha
            active[idx[done]] = False
            if not active.any():
                break
        return _out(u, y.reshape(u_.shape))


def _image_interval(t: Transform, interval):
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        ends = np.asarray(t.forward(np.asarray(interval, dtype=float)), dtype=float)
    return float(np.min(ends)), float(np.max(ends))


def pushforward_density(dist: ParametricDist, t: Transform) -> AnalyticDensity:
    """Density of f(X) by change of variables: p_X(f^-1(y)) * |d f^-1 / dy|."""
    if t.inverse is None or t.derivative is None:
        raise UnsupportedTransformError(f"transform {t.name!r} needs an analytic inverse and derivative")
    if not t.monotone:
        raise UnsupportedTransformError(f"transform {t.name!r} is not monotone")
    if dist.discrete:
        raise UnsupportedTransformError("change of variables needs a continuous input")

    def density(y):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            x = np.asarray(t.inverse(y), dtype=float)
            jac = np.abs(np.asarray(t.derivative(x), dtype=float))
            px = np.asarray(dist.pdf(x), dtype=float)
        singular = (jac == 0) & (px > 0)
        if np.any(singular):
            raise SingularityError(f"derivative of {t.name} vanishes at y={np.asarray(y)[singular][0]!r}")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(px > 0, px / jac, 0.0)
        return np.where(np.isfinite(out), out, 0.0)

    support = _image_interval(t, dist.support)
    table_range = _image_interval(t, dist.effective_range(1e-15))
    extra = [getattr(dist, "mu", None)] + list(getattr(dist, "means", []))
    points = [float(t.forward(np.float64(p))) for p in extra if p is not None]
    return AnalyticDensity(density, support, table_range, points, name=f"{t.name}#{dist.id}")


def challenge_output_density() -> AnalyticDensity:
    """Closed-form density of sigmoid(X) for the two-mode challenge input.

    Written out directly from the mixture and the logistic Jacobian rather than
    through :func:`pushforward_density`, so the two can be checked against each other.
    """

    def density(y):
        y = np.asarray(y, dtype=float)
        lg = 1.0 + np.log(y / (1.0 - y))
        mix = 0.6 * (1.0 / (0.5 * SQRT2PI)) * np.exp(-2.0 * (lg - 2.0) ** 2) + 0.4 * (
            1.0 / SQRT2PI
        ) * np.exp(-((lg + 1.0) ** 2) / 2.0)
        e = np.exp(1.0 - lg)
        jac = e / (e + 1.0) ** 2
        return mix / jac

    sig = sigmoid_transform()
    rng = _image_interval(sig, CHALLENGE_INPUT.effective_range(1e-15))
    pts = [float(sig(np.float64(-1.0))), float(sig(np.float64(2.0)))]
    return AnalyticDensity(density, (0.0, 1.0), rng, pts, name="challenge-output")


def density_modes(density: AnalyticDensity, grid_size: int = 20001) -> np.ndarray:
    """Local maxima of a density located by grid search over its table range."""
    lo, hi = density.table_range
    y = np.linspace(lo, hi, grid_size)
    p = density.pdf(y)
    interior = (p[1:-1] > p[:-2]) & (p[1:-1] >= p[2:])
    return y[1:-1][interior]


def mixture_components(dist: GaussianMixture) -> Sequence[Gaussian]:
    return [Gaussian(m, s) for _, m, s in dist.components]


__all__ = [
    "AnalyticDensity",
    "Bernoulli",
    "CHALLENGE_INPUT",
    "Exponential",
    "Gaussian",
    "GaussianMixture",
    "LogNormal",
    "ParametricDist",
    "Transform",
    "Uniform",
    "affine",
    "cdf",
    "challenge_output_density",
    "density_modes",
    "exp_transform",
    "expectation",
    "icdf",
    "identity",
    "pdf",
    "poiseuille_flow",
    "poiseuille_transforms",
    "positive_power",
    "power",
    "pushforward_density",
    "reciprocal",
    "sigmoid_transform",
]
