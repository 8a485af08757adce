"""Monte Carlo pipeline: sampling, per-sample evaluation and post-processing.

The three stages are kept as separate functions so that each can be timed
or swapped on its own (the physical generator simulators in
:mod:`distprop.pprvg_sim` replace the sampling stage, for instance).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Mapping

import numpy as np

from .core_dist import Bernoulli, Gaussian, GaussianMixture, ParametricDist, Transform, Uniform
from .errors import ArgumentError, FormatError, NonFiniteError

ALGORITHM = "philox4x64-10"


class RngHandle:
    """Seeded uniform generator with a bit-exact, platform-independent stream.

    Backed by the Philox4x64-10 counter-based generator.  A handle is owned by a
    single caller; use :meth:`spawn` for independent child streams.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ArgumentError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.algorithm = ALGORITHM
        self._gen = np.random.Generator(np.random.Philox(seed))

    def random(self, n: int) -> np.ndarray:
        """``n`` uniforms on [0, 1) with 53 random bits each."""
        return self._gen.random(n)

    def spawn(self, label: int) -> "RngHandle":
        return RngHandle(derive_seed(self.seed, label))

    def __repr__(self):
        return f"RngHandle({self.algorithm}, seed={self.seed})"


def derive_seed(*parts) -> int:
    """Hash an arbitrary tuple of ints/strings into a 64-bit seed."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class Provenance:
    generator: str
    seed: int | None
    source: str

    def header(self) -> str:
        return f"generator={self.generator},seed={self.seed},source={self.source}"

    @classmethod
    def parse(cls, text: str) -> "Provenance":
        fields = dict(item.split("=", 1) for item in text.strip().split(",", 2))
        try:
            seed = None if fields["seed"] == "None" else int(fields["seed"])
            return cls(fields["generator"], seed, fields["source"])
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad provenance header {text!r}") from exc


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Ordered i.i.d. variates together with where they came from."""

    values: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise ArgumentError("SampleSet values must be one-dimensional")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self):
        return self.n

    def with_values(self, values, source: str | None = None) -> "SampleSet":
        prov = self.provenance
        if source is not None:
            prov = Provenance(prov.generator, prov.seed, source)
        return SampleSet(values, prov)


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    variance: float
    count: int

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _check_count(n):
    if int(n) != n or n < 1:
        raise ArgumentError(f"sample count must be a positive integer, got {n}")
    return int(n)


# ------------------------------------------------------------------------ sampling


def sample_uniform(rng: RngHandle, n: int) -> SampleSet:
    n = _check_count(n)
    return SampleSet(rng.random(n), Provenance(rng.algorithm, rng.seed, "uniform(0,1)"))


def _box_muller(rng: RngHandle, n: int) -> np.ndarray:
    pairs = (n + 1) // 2
    u = rng.random(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))  # 1 - u lies in (0, 1]
    angle = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:n]


def sample_gaussian(rng: RngHandle, mu: float, sigma: float, n: int) -> SampleSet:
    """Box-Muller on uniform pairs, then the affine map mu + sigma * z."""
    if not sigma > 0:
        raise ArgumentError(f"sigma must be > 0, got {sigma}")
    n = _check_count(n)
    z = _box_muller(rng, n)
    return SampleSet(mu + sigma * z, Provenance(rng.algorithm, rng.seed, f"gaussian({mu:g},{sigma:g})"))


def sample_icdf(rng: RngHandle, dist: ParametricDist, n: int) -> SampleSet:
    """Inverse transform sampling.  Bernoulli uses the threshold ``u < p``."""
    n = _check_count(n)
    u = rng.random(n)
    if isinstance(dist, Bernoulli):
        values = (u < dist.p).astype(float)
    elif isinstance(dist, Uniform) and dist.lower == 0.0 and dist.upper == 1.0:
        values = u
    else:
        # u = 0 has probability 2**-53; nudge it onto the open interval
        values = dist.icdf(np.where(u > 0.0, u, np.nextafter(0.0, 1.0)))
    return SampleSet(values, Provenance(rng.algorithm, rng.seed, dist.id))


def sample_mixture(rng: RngHandle, dist: GaussianMixture, n: int) -> SampleSet:
    """Pick a component per draw from one uniform, then Box-Muller for the Gaussian."""
    n = _check_count(n)
    w = dist.weights
    choice = np.searchsorted(np.cumsum(w)[:-1], rng.random(n), side="right")
    z = _box_muller(rng, n)
    values = dist.means[choice] + dist.stds[choice] * z
    return SampleSet(values, Provenance(rng.algorithm, rng.seed, dist.id))


def sample(rng: RngHandle, dist: ParametricDist, n: int) -> SampleSet:
    """Sample with the usual generator for each family (affine uniforms, Box-Muller, ...)."""
    if isinstance(dist, Gaussian):
        s = sample_gaussian(rng, dist.mu, dist.sigma, n)
        return s.with_values(s.values, dist.id)
    if isinstance(dist, GaussianMixture):
        return sample_mixture(rng, dist, n)
    if isinstance(dist, Uniform):
        n = _check_count(n)
        u = rng.random(n)
        return SampleSet(dist.lower + (dist.upper - dist.lower) * u, Provenance(rng.algorithm, rng.seed, dist.id))
    return sample_icdf(rng, dist, n)


# ---------------------------------------------------------------------- evaluation


def _check_finite(values, what):
    bad = ~np.isfinite(values)
    if bad.any():
        count = int(bad.sum())
        first = int(np.flatnonzero(bad)[0])
        raise NonFiniteError(f"{what} produced {count} non-finite output(s), first at index {first}", count=count)


def evaluate(samples: SampleSet, t: Transform | Callable) -> SampleSet:
    """y_i = f(x_i), order preserved.  Any non-finite output fails the whole run."""
    with np.errstate(all="ignore"):
        y = np.asarray(t(samples.values), dtype=float)
    if y.shape != samples.values.shape:
        raise ArgumentError("transform must map an array to an array of the same shape")
    _check_finite(y, getattr(t, "name", "transform"))
    return samples.with_values(y, f"{getattr(t, 'name', 'f')}({samples.provenance.source})")


def evaluate_multi(inputs: Mapping[str, SampleSet], expr: Callable[..., np.ndarray]) -> SampleSet:
    """Evaluate a multivariate map on index-aligned joint draws.

    ``expr`` is called with one keyword argument per input name.
    """
    if not inputs:
        raise ArgumentError("evaluate_multi needs at least one input")
    lengths = {name: s.n for name, s in inputs.items()}
    if len(set(lengths.values())) != 1:
        raise ArgumentError(f"input sample counts differ: {lengths}")
    with np.errstate(all="ignore"):
        y = np.asarray(expr(**{name: s.values for name, s in inputs.items()}), dtype=float)
    n = next(iter(lengths.values()))
    y = np.broadcast_to(y, (n,)).copy() if y.shape != (n,) else y
    _check_finite(y, getattr(expr, "__name__", "expression"))
    first = next(iter(inputs.values()))
    return first.with_values(y, f"{getattr(expr, '__name__', 'expr')}({','.join(inputs)})")


# ----------------------------------------------------------------- post-processing


def kahan_mean_var(values: np.ndarray) -> tuple[float, float]:
    """Mean and unbiased variance with exactly rounded (fsum) accumulation."""
    n = values.shape[0]
    mean = math.fsum(values) / n
    d = values - mean
    var = math.fsum(d * d) / (n - 1)
    return mean, var


def post_process(
    samples: SampleSet,
    mode: Literal["mean", "identity", "histogram"] = "mean",
    bins: int = 10,
) -> SummaryStats | SampleSet | Histogram:
    """Monte Carlo integration (mean), sampling (identity) or simulation (histogram)."""
    if mode == "identity":
        return samples
    if mode == "mean":
        if samples.n < 2:
            raise ArgumentError("mean/variance need at least two samples")
        mean, var = kahan_mean_var(samples.values)
        return SummaryStats(mean, var, samples.n)
    if mode == "histogram":
        if bins < 1:
            raise ArgumentError("histogram needs at least one bin")
        if samples.n < 1:
            raise ArgumentError("histogram of an empty sample set")
        counts, edges = np.histogram(samples.values, bins=bins)
        return Histogram(edges, counts)
    raise ArgumentError(f"unknown post-processing mode {mode!r}")


# --------------------------------------------------------------------- Buffon


def needle_crosses(offset, angle):
    """Unit needle, unit line spacing: crossing iff centre offset <= sin(angle) / 2."""
    return np.asarray(offset) <= 0.5 * np.sin(angle)


def buffon_estimate(rng: RngHandle, n: int) -> float:
    """Fraction of n dropped needles that cross a line; estimates 2 / pi."""
    n = _check_count(n)
    u = rng.random(2 * n)
    offset = 0.5 * u[:n]
    angle = 0.5 * np.pi * u[n:]
    return float(np.count_nonzero(needle_crosses(offset, angle))) / n


# ------------------------------------------------------------------------ CSV I/O


def write_samples_csv(samples: SampleSet, path) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"# {samples.provenance.header()}\n")
        np.savetxt(fh, samples.values, fmt="%.17g")
    return path


def read_samples_csv(path) -> SampleSet:
    path = Path(path)
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise FormatError(f"{path}: missing provenance header line")
        prov = Provenance.parse(first[1:])
        try:
            values = np.loadtxt(fh, dtype=float, ndmin=1)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    return SampleSet(values, prov)
