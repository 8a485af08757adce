"""Software stand-ins for two programmable non-uniform random variate generators.

Spot
    A Gaussian noise source reshaped by one multiply and one add per variate.
    A mixture program picks a component per draw from one uniform.
Grappa
    A target ICDF approximated in the span of device response curves.  The
    curves are orthonormalised by modified Gram-Schmidt on a midpoint grid,
    the ICDF is projected onto them and uniforms are pushed through the
    result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import integrate

from .core_dist import Gaussian, GaussianMixture, ParametricDist
from .errors import ArgumentError, DependentBasisError, FormatError, NumericalError, SourceDepletedError
from .mc_engine import Provenance, RngHandle, SampleSet, _box_muller

DEFAULT_GRID = 4096
DEPENDENCE_TOL = 1e-10

Response = Callable[[np.ndarray], np.ndarray]


# --------------------------------------------------------------------- Spot


class NoiseSource:
    """Stream of reals standing in for a physical Gaussian noise measurement.

    ``simulated-gaussian`` draws Box-Muller variates mu0 + sigma0 * z from a
    seeded handle.  ``file-replay`` hands out recorded values in order and
    raises :class:`SourceDepletedError` once they run out.
    """

    def __init__(
        self,
        kind: Literal["simulated-gaussian", "file-replay"] = "simulated-gaussian",
        *,
        mu0: float = 0.0,
        sigma0: float = 1.0,
        seed: int | None = 0,
        path: str | Path | None = None,
        values: Sequence[float] | None = None,
    ):
        self.kind = kind
        self.seed = seed
        self.mu0 = float(mu0)
        self.sigma0 = float(sigma0)
        self.path = Path(path) if path is not None else None
        if kind == "simulated-gaussian":
            if not self.sigma0 > 0:
                raise ArgumentError(f"noise sigma must be > 0, got {sigma0}")
            self._rng = RngHandle(0 if seed is None else seed)
            self._recorded = None
        elif kind == "file-replay":
            if values is None:
                if self.path is None:
                    raise ArgumentError("a replay source needs a path or recorded values")
                try:
                    values = np.loadtxt(self.path, dtype=float, ndmin=1, comments="#")
                except ValueError as exc:
                    raise FormatError(f"{self.path}: {exc}") from exc
            self._recorded = np.asarray(values, dtype=float).reshape(-1)
            self._rng = None
        else:
            raise ArgumentError(f"unknown noise source kind {kind!r}")
        self._cursor = 0

    @property
    def remaining(self) -> float:
        if self._recorded is None:
            return math.inf
        return self._recorded.size - self._cursor

    def draw(self, n: int) -> np.ndarray:
        if n == 0:
            return np.empty(0)
        if self._recorded is None:
            z = _box_muller(self._rng, n)
            if self.mu0 == 0.0 and self.sigma0 == 1.0:
                return z
            return self.mu0 + self.sigma0 * z
        if n > self.remaining:
            raise SourceDepletedError(
                f"replay source {self.path or '<memory>'} has {self.remaining} values left, {n} requested"
            )
        out = self._recorded[self._cursor : self._cursor + n]
        self._cursor += n
        return out.copy()

    @property
    def label(self) -> str:
        if self.kind == "simulated-gaussian":
            return f"simulated-gaussian({self.mu0:g},{self.sigma0:g})"
        return f"file-replay({self.path or '<memory>'})"


@dataclass(frozen=True)
class SpotProgram:
    """Mixture of affine maps: component i emits scales[i] * z + offsets[i] with probability weights[i]."""

    components: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        comps = tuple((float(w), float(a), float(b)) for w, a, b in self.components)
        if not comps:
            raise ArgumentError("a Spot program needs at least one component")
        if any(not w > 0 for w, _, _ in comps):
            raise ArgumentError("Spot component weights must be positive")
        total = math.fsum(w for w, _, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ArgumentError(f"Spot component weights sum to {total!r}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c[0] for c in self.components])

    @property
    def scales(self) -> np.ndarray:
        return np.array([c[1] for c in self.components])

    @property
    def offsets(self) -> np.ndarray:
        return np.array([c[2] for c in self.components])

    @classmethod
    def from_mixture(cls, mix: GaussianMixture) -> "SpotProgram":
        return cls(tuple((w, s, m) for w, m, s in mix.components))

    @classmethod
    def from_gaussian(cls, g: Gaussian) -> "SpotProgram":
        return cls(((1.0, g.sigma, g.mu),))


def spot_sample(src: NoiseSource, prog: SpotProgram, n: int, selector: RngHandle | None = None) -> SampleSet:
    """Draw n variates from a programmed Spot generator.

    The selector handle supplies one uniform per draw to pick a component; it
    is separate from the noise source so that the source stream is untouched
    by selection.  A single-component program skips selection entirely.
    """
    if n < 0 or int(n) != n:
        raise ArgumentError(f"sample count must be a non-negative integer, got {n}")
    n = int(n)
    z = src.draw(n)
    if len(prog.components) == 1:
        _, a, b = prog.components[0]
        values = a * z + b
    else:
        if selector is None:
            raise ArgumentError("a mixture program needs a selector RngHandle")
        idx = np.searchsorted(np.cumsum(prog.weights)[:-1], selector.random(n), side="right")
        values = prog.scales[idx] * z + prog.offsets[idx]
    return SampleSet(values, Provenance("spot", src.seed, f"spot[{len(prog.components)}]<-{src.label}"))


def fit_spot_program(target: ParametricDist, k: int = 8) -> SpotProgram:
    """Program Spot for an arbitrary target by quantile-slice moment matching.

    (0, 1) is cut into k equal-probability slices.  Each slice becomes one
    Gaussian component with the conditional mean and standard deviation of
    the target on that slice.  Gaussians and Gaussian mixtures are programmed
    exactly instead.
    """
    if isinstance(target, Gaussian):
        return SpotProgram.from_gaussian(target)
    if isinstance(target, GaussianMixture):
        return SpotProgram.from_mixture(target)
    if k < 1:
        raise ArgumentError("need at least one Spot component")
    comps = []
    edges = np.linspace(0.0, 1.0, k + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        m1 = integrate.quad(lambda u: float(target.icdf(u)), lo, hi, limit=200)[0] / width
        m2 = integrate.quad(lambda u: (float(target.icdf(u)) - m1) ** 2, lo, hi, limit=200)[0] / width
        comps.append((1.0 / k, math.sqrt(max(m2, 0.0)), m1))
    # make the weights sum to one exactly
    w_last = 1.0 - math.fsum(c[0] for c in comps[:-1])
    comps[-1] = (w_last, comps[-1][1], comps[-1][2])
    return SpotProgram(tuple(comps))


# -------------------------------------------------------------------- Grappa


def midpoint_grid(q: int = DEFAULT_GRID) -> np.ndarray:
    if q < 1:
        raise ArgumentError("grid size must be positive")
    return (np.arange(q) + 0.5) / q


def polynomial_responses(k: int) -> list[Response]:
    """Nested powers of the centred variable 2u - 1 (degree 0 .. k-1)."""

    def power(j):
        def g(u):
            return (2.0 * np.asarray(u, dtype=float) - 1.0) ** j

        g.__name__ = f"poly{j}"
        return g

    return [power(j) for j in range(k)]


def gfet_responses(k: int) -> list[Response]:
    """Surrogate transfer curves of graphene transistors.

    The list starts with a constant, then alternates V-shaped ambipolar
    conductance curves sqrt(1 + ((u - v) / w)^2) with tanh saturation curves
    at staggered bias points.  Prefixes are nested, so the residual of a fit
    cannot grow with k.
    """
    shapes: list[Response] = []

    def const(u):
        return np.ones_like(np.asarray(u, dtype=float))

    const.__name__ = "gfet_const"
    shapes.append(const)
    centres = [0.5, 0.2, 0.8, 0.35, 0.65, 0.05, 0.95, 0.5, 0.15, 0.85, 0.3, 0.7]
    widths = [0.15, 0.10, 0.10, 0.25, 0.25, 0.06, 0.06, 0.40, 0.08, 0.08, 0.2, 0.2]
    j = 0
    while len(shapes) < k:
        v, w = centres[j % len(centres)], widths[j % len(widths)] * (1 + 0.37 * (j // len(centres)))
        if j % 2 == 0:

            def g(u, v=v, w=w):
                return np.sqrt(1.0 + ((np.asarray(u, dtype=float) - v) / w) ** 2)

            g.__name__ = f"gfet_ambipolar(v={v:g},w={w:g})"
        else:

            def g(u, v=v, w=w):
                return np.tanh((np.asarray(u, dtype=float) - v) / w)

            g.__name__ = f"gfet_tanh(v={v:g},w={w:g})"
        shapes.append(g)
        j += 1
    return shapes[:k]


def load_response_table(path) -> Response:
    """Two-column CSV (u, g(u)) turned into a linearly interpolated response."""
    path = Path(path)
    try:
        table = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2, comments="#")
    except ValueError:
        try:
            table = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2, skiprows=1)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    if table.shape[1] != 2 or table.shape[0] < 2:
        raise FormatError(f"{path}: expected at least two rows of (u, g)")
    order = np.argsort(table[:, 0], kind="stable")
    u, g = table[order, 0], table[order, 1]
    if np.any(np.diff(u) <= 0):
        raise FormatError(f"{path}: repeated u values")

    def response(x):
        return np.interp(np.asarray(x, dtype=float), u, g)

    response.__name__ = f"table({path.name})"
    return response


@dataclass(frozen=True, eq=False)
class GalerkinBasis:
    """Orthonormal basis e = T g built from raw response curves g.

    ``values`` holds e sampled on the midpoint grid, one row per basis
    function.  ``transform`` is the lower-triangular T, so the basis can be
    evaluated anywhere from the raw curves.
    """

    responses: tuple[Response, ...]
    transform: np.ndarray
    values: np.ndarray
    q: int
    gram_condition: float

    @property
    def k(self) -> int:
        return len(self.responses)

    @property
    def grid(self) -> np.ndarray:
        return midpoint_grid(self.q)

    def raw(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.stack([np.broadcast_to(g(u), u.shape) for g in self.responses])

    def __call__(self, u) -> np.ndarray:
        return self.transform @ self.raw(u)

    def inner(self, f, g) -> float:
        return float(np.dot(f, g) / self.q)

    def gram(self) -> np.ndarray:
        return self.values @ self.values.T / self.q


def build_basis(responses: Sequence[Response], k: int | None = None, q: int = DEFAULT_GRID) -> GalerkinBasis:
    """Modified Gram-Schmidt, with one reorthogonalisation pass, under <f, g> = mean(f g) on the grid."""
    responses = tuple(responses)
    k = len(responses) if k is None else int(k)
    if not 1 <= k <= len(responses):
        raise ArgumentError(f"K must lie in 1..{len(responses)}, got {k}")
    responses = responses[:k]
    u = midpoint_grid(q)
    raw = np.stack([np.broadcast_to(np.asarray(g(u), dtype=float), u.shape) for g in responses])
    if not np.all(np.isfinite(raw)):
        raise NumericalError("a response curve is not finite on the grid")

    e = np.zeros((k, q))
    t = np.zeros((k, k))
    for j in range(k):
        v = raw[j].copy()
        coef = np.zeros(k)
        coef[j] = 1.0
        for _ in range(2):
            for i in range(j):
                p = np.dot(e[i], v) / q
                v -= p * e[i]
                coef -= p * t[i]
        norm = math.sqrt(np.dot(v, v) / q)
        if norm < DEPENDENCE_TOL:
            raise DependentBasisError(j, norm)
        e[j] = v / norm
        t[j] = coef / norm

    gram_raw = raw @ raw.T / q
    cond = float(np.linalg.cond(gram_raw))
    e.setflags(write=False)
    t.setflags(write=False)
    return GalerkinBasis(responses, t, e, q, cond)


@dataclass(frozen=True, eq=False)
class IcdfApprox:
    coefficients: np.ndarray
    basis: GalerkinBasis
    residual: float
    target_id: str
    nonmonotonicity: float
    raw_weights: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.coefficients.size

    @property
    def monotone(self) -> bool:
        return self.nonmonotonicity == 0.0

    def on_grid(self) -> np.ndarray:
        return self.coefficients @ self.basis.values

    def __call__(self, u) -> np.ndarray:
        # sum_j w_j g_j(u): exactly K response evaluations per variate
        u = np.asarray(u, dtype=float)
        out = self.raw_weights[0] * self.basis.responses[0](u)
        for w, g in zip(self.raw_weights[1:], self.basis.responses[1:]):
            out = out + w * g(u)
        return out


def fit_icdf(basis: GalerkinBasis, target: ParametricDist) -> IcdfApprox:
    """Galerkin projection of the target ICDF onto the basis.

    The grid is the clipped midpoint grid [1/(2Q), 1 - 1/(2Q)], so unbounded
    supports never evaluate the ICDF at 0 or 1.  Non-monotonicity of the fit
    (total downward variation on the grid) is reported, not repaired.
    """
    y = np.asarray(target.icdf(basis.grid), dtype=float)
    bad = ~np.isfinite(y)
    if bad.any():
        raise NumericalError(f"ICDF of {target.id} is not finite at {int(bad.sum())} grid points")
    c = basis.values @ y / basis.q
    approx = c @ basis.values
    resid = math.sqrt(float(np.dot(y - approx, y - approx)) / basis.q)
    drops = np.diff(approx)
    nonmono = float(np.maximum(-drops, 0.0).sum())
    c.setflags(write=False)
    w = basis.transform.T @ c
    w.setflags(write=False)
    return IcdfApprox(c, basis, resid, target.id, nonmono, w)


def grappa_sample(approx: IcdfApprox, rng: RngHandle, n: int) -> SampleSet:
    """Inverse transform sampling through the fitted ICDF."""
    if n < 0 or int(n) != n:
        raise ArgumentError(f"sample count must be a non-negative integer, got {n}")
    u = rng.random(int(n))
    return SampleSet(approx(u), Provenance(rng.algorithm, rng.seed, f"grappa[K={approx.k}]({approx.target_id})"))
