"""Deterministic distributional arithmetic on fixed-size Dirac mixtures.

A distribution is held as ``r`` atoms (position, mass).  Inputs are built
from equal-mass midpoint quantiles, unary maps move atoms, and binary
operations form all pairwise atoms of independent operands before
re-quantizing back to ``r`` equal-mass atoms.  Re-running any computation
with the same inputs gives bit-identical atoms: there is no sampling and
hence nothing to converge.

Correlation between operands is not tracked.  ``x * x`` built from two uses
of the same input is evaluated as the product of two independent copies;
:func:`eval_expr` warns when that happens.  Integer powers are a unary node
for this reason.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Mapping

import numba
import numpy as np

from .core_dist import ParametricDist, Transform
from .errors import ArgumentError, FormatError, NumericalError, PropagationError, SingularityError
from .mc_engine import Provenance, RngHandle, SampleSet, SummaryStats

BinaryOp = Literal["add", "sub", "mul", "div"]

_MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiracMixture:
    """``r`` weighted atoms, sorted by position, masses summing to one."""

    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        x = np.array(self.positions, dtype=float).reshape(-1)
        m = np.array(self.masses, dtype=float).reshape(-1)
        if x.shape != m.shape or x.size == 0:
            raise ArgumentError("positions and masses must be non-empty and of equal length")
        if not np.all(np.isfinite(x)):
            raise ArgumentError("atom positions must be finite")
        if np.any(np.diff(x) < 0):
            raise ArgumentError("atom positions must be nondecreasing")
        if not np.all(m > 0):
            raise ArgumentError("atom masses must be strictly positive")
        if abs(m.sum() - 1.0) > _MASS_TOL:
            raise ArgumentError(f"atom masses must sum to 1, got {m.sum()!r}")
        x.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "masses", m)

    @property
    def r(self) -> int:
        return self.positions.shape[0]

    def __len__(self):
        return self.r

    @classmethod
    def point(cls, value: float) -> "DiracMixture":
        return cls(np.array([value], dtype=float), np.array([1.0]))

    @property
    def mean(self) -> float:
        return float(np.dot(self.masses, self.positions))

    def cdf(self, x):
        cum = np.cumsum(self.masses)
        idx = np.searchsorted(self.positions, np.asarray(x, dtype=float), side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def same_atoms(self, other: "DiracMixture") -> bool:
        return np.array_equal(self.positions, other.positions) and np.array_equal(self.masses, other.masses)


def _sorted_mixture(x: np.ndarray, m: np.ndarray) -> DiracMixture:
    order = np.argsort(x, kind="stable")
    return DiracMixture(x[order], m[order])


# ------------------------------------------------------------------ construction


def from_dist(dist: ParametricDist, r: int) -> DiracMixture:
    """r equal-mass atoms at the midpoint quantiles (i - 1/2) / r."""
    if int(r) != r or r < 2:
        raise ArgumentError(f"representation size must be an integer >= 2, got {r}")
    r = int(r)
    u = (np.arange(r) + 0.5) / r
    return DiracMixture(np.asarray(dist.icdf(u), dtype=float), np.full(r, 1.0 / r))


# ------------------------------------------------------------------- unary maps


def apply_unary(d: DiracMixture, t: Transform | Callable, *, path: str = "") -> DiracMixture:
    """Move every atom through f; masses are kept and atoms re-sorted."""
    with np.errstate(all="ignore"):
        y = np.asarray(t(d.positions), dtype=float)
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        name = getattr(t, "name", "f")
        raise PropagationError(f"{name}(atom {i} at {d.positions[i]!r}) is not finite", path)
    if np.all(np.diff(y) >= 0):
        return DiracMixture(y, d.masses)
    return _sorted_mixture(y, d.masses.copy())


# ---------------------------------------------------------------- requantization


@numba.njit(cache=True)
def _requantize_kernel(x, m, r, total, tol):
    """Walk sorted atoms, filling r buckets of mass total / r each.

    An atom that straddles a bucket boundary is split.  Bucket positions are
    r * (sum of mass * position) / total, clamped to the range of atoms that
    contributed, which keeps degenerate inputs exact.
    """
    out = np.empty(r)
    share = total / r
    k = 0
    filled = 0.0
    acc = 0.0
    got = 0.0
    lo = x[0]
    hi = x[0]
    for j in range(x.shape[0]):
        rem = m[j]
        xj = x[j]
        while rem > 0.0:
            if got == 0.0:
                lo = xj
            hi = xj
            room = (k + 1) * share - filled
            if k == r - 1 or rem <= room + tol:
                take = rem
            else:
                take = room
            acc += take * xj
            got += take
            filled += take
            rem -= take
            if k < r - 1 and filled >= (k + 1) * share - tol:
                v = acc / share
                out[k] = min(max(v, lo), hi)
                k += 1
                acc = 0.0
                got = 0.0
            if rem <= 0.0:
                break
    if k < r:
        if got > 0.0:
            v = acc / share
            out[k] = min(max(v, lo), hi)
        else:
            out[k] = x[x.shape[0] - 1]
        for kk in range(k + 1, r):
            out[kk] = out[k]
    return out


def requantize(positions, masses, r: int) -> DiracMixture:
    """Reduce a weighted atom list to ``r`` equal-mass atoms.

    Atoms are stably sorted by position, then the discrete CDF is walked and
    cut into r pieces of equal mass; an atom straddling a cut is split.  Each
    output atom sits at the mass-weighted mean of its piece, so the overall
    mean is preserved.
    """
    x = np.asarray(positions, dtype=float).reshape(-1)
    m = np.asarray(masses, dtype=float).reshape(-1)
    if x.size == 0:
        raise ArgumentError("cannot requantize an empty atom list")
    if x.shape != m.shape:
        raise ArgumentError("positions and masses differ in length")
    if int(r) != r or r < 1:
        raise ArgumentError(f"representation size must be a positive integer, got {r}")
    order = np.argsort(x, kind="stable")
    xs = np.ascontiguousarray(x[order])
    ms = np.ascontiguousarray(m[order])
    total = float(ms.sum())
    out = _requantize_kernel(xs, ms, int(r), total, _MASS_TOL * total)
    return DiracMixture(out, np.full(int(r), 1.0 / r))


# ------------------------------------------------------------------ binary ops

_OPS: dict[str, Callable] = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
}


def combine(d1: DiracMixture, d2: DiracMixture, op: BinaryOp, r: int | None = None, *, path: str = "") -> DiracMixture:
    """Combine two independent mixtures: all r1*r2 pairwise atoms, then requantize to r.

    ``r`` defaults to the larger of the two operand sizes.
    """
    if op not in _OPS:
        raise ArgumentError(f"unknown binary operation {op!r}")
    if op == "div" and np.any(d2.positions == 0.0):
        raise SingularityError("divisor has an atom at 0")
    if r is None:
        r = max(d1.r, d2.r)
    with np.errstate(all="ignore"):
        x = _OPS[op](d1.positions[:, None], d2.positions[None, :]).ravel()
    if not np.all(np.isfinite(x)):
        raise PropagationError(f"{op} produced a non-finite atom", path)
    m = np.multiply.outer(d1.masses, d2.masses).ravel()
    if x.size == 1:
        return DiracMixture(x, np.array([1.0]))
    return requantize(x, m, r)


# ------------------------------------------------------------------ expressions


@dataclass(frozen=True, eq=False)
class ExprNode:
    """Node of an expression DAG over named uncertain inputs.

    Build graphs with :func:`var`, :func:`const` and ordinary arithmetic
    operators; ``node ** k`` needs an integer k.
    """

    op: str
    children: tuple["ExprNode", ...] = ()
    payload: object = None

    def __add__(self, other):
        return ExprNode("add", (self, _node(other)))

    def __radd__(self, other):
        return ExprNode("add", (_node(other), self))

    def __sub__(self, other):
        return ExprNode("sub", (self, _node(other)))

    def __rsub__(self, other):
        return ExprNode("sub", (_node(other), self))

    def __mul__(self, other):
        return ExprNode("mul", (self, _node(other)))

    def __rmul__(self, other):
        return ExprNode("mul", (_node(other), self))

    def __truediv__(self, other):
        return ExprNode("div", (self, _node(other)))

    def __rtruediv__(self, other):
        return ExprNode("div", (_node(other), self))

    def __neg__(self):
        return ExprNode("neg", (self,))

    def __pow__(self, k):
        if int(k) != k:
            raise ArgumentError("only integer powers are supported")
        return ExprNode("pow-int", (self,), int(k))

    def __repr__(self):
        if self.op == "input":
            return f"var({self.payload!r})"
        if self.op == "constant":
            return f"const({self.payload!r})"
        return f"{self.op}({', '.join(map(repr, self.children))})"


def _node(v) -> ExprNode:
    return v if isinstance(v, ExprNode) else const(v)


def var(name: str) -> ExprNode:
    return ExprNode("input", (), name)


def const(value: float) -> ExprNode:
    return ExprNode("constant", (), float(value))


def exp(node: ExprNode) -> ExprNode:
    return ExprNode("exp", (_node(node),))


def affine_node(node: ExprNode, scale: float, shift: float = 0.0) -> ExprNode:
    return ExprNode("affine", (_node(node),), (float(scale), float(shift)))


def apply_monotone(node: ExprNode, t: Transform) -> ExprNode:
    return ExprNode("apply-monotone", (_node(node),), t)


def input_use_counts(expr: ExprNode) -> Counter:
    """Number of distinct root-to-leaf paths reaching each named input."""
    memo: dict[int, Counter] = {}

    def walk(node):
        key = id(node)
        if key not in memo:
            if node.op == "input":
                memo[key] = Counter({node.payload: 1})
            else:
                c = Counter()
                for ch in node.children:
                    c.update(walk(ch))
                memo[key] = c
        return memo[key]

    return walk(expr)


def _unary(node: ExprNode, d: DiracMixture, path: str) -> DiracMixture:
    op = node.op
    if op == "neg":
        return apply_unary(d, np.negative, path=path)
    if op == "exp":
        return apply_unary(d, np.exp, path=path)
    if op == "pow-int":
        k = node.payload
        if k < 0 and np.any(d.positions == 0.0):
            raise SingularityError("negative power of an atom at 0")
        return apply_unary(d, lambda x: x**k if k >= 0 else 1.0 / x ** (-k), path=path)
    if op == "affine":
        a, b = node.payload
        return apply_unary(d, lambda x: a * x + b, path=path)
    if op == "apply-monotone":
        return apply_unary(d, node.payload, path=path)
    raise PropagationError(f"unknown operator {op!r}", path)


def eval_expr(expr: ExprNode, inputs: Mapping[str, DiracMixture], r: int) -> DiracMixture:
    """Evaluate an expression bottom-up, requantizing to r after each binary node."""
    if int(r) != r or r < 1:
        raise ArgumentError(f"representation size must be a positive integer, got {r}")
    reused = sorted(name for name, c in input_use_counts(expr).items() if c > 1)
    if reused:
        warnings.warn(
            f"inputs {reused} are used more than once; their uses are treated as independent",
            stacklevel=2,
        )
    memo: dict[int, DiracMixture] = {}

    def ev(node: ExprNode, path: str) -> DiracMixture:
        key = id(node)
        if key in memo:
            return memo[key]
        op = node.op
        if op == "input":
            try:
                out = inputs[node.payload]
            except KeyError:
                raise PropagationError(f"input {node.payload!r} is not bound", path) from None
        elif op == "constant":
            out = DiracMixture.point(node.payload)
        elif op in _OPS:
            left = ev(node.children[0], f"{path}/{op}[0]")
            right = ev(node.children[1], f"{path}/{op}[1]")
            try:
                out = combine(left, right, op, r, path=path)
            except SingularityError as exc:
                raise PropagationError(str(exc), path) from exc
        else:
            child = ev(node.children[0], f"{path}/{op}")
            try:
                out = _unary(node, child, path)
            except SingularityError as exc:
                raise PropagationError(str(exc), path) from exc
        memo[key] = out
        return out

    try:
        return ev(expr, "root")
    except NumericalError:
        raise
    except (FloatingPointError, ZeroDivisionError) as exc:
        raise PropagationError(str(exc), "root") from exc


# ---------------------------------------------------------------- read-out


def moments(d: DiracMixture) -> SummaryStats:
    """Mean and variance of the atom measure (variance is the exact second central moment)."""
    mean = math.fsum(d.masses * d.positions)
    dev = d.positions - mean
    var = math.fsum(d.masses * dev * dev)
    return SummaryStats(mean, var, d.r)


def sample_repr(d: DiracMixture, rng: RngHandle, n: int) -> SampleSet:
    """Inverse-transform samples from the discrete CDF of the atoms."""
    if int(n) != n or n < 1:
        raise ArgumentError(f"sample count must be a positive integer, got {n}")
    cum = np.cumsum(d.masses)
    idx = np.searchsorted(cum, rng.random(int(n)), side="right")
    np.minimum(idx, d.r - 1, out=idx)
    return SampleSet(d.positions[idx], Provenance(rng.algorithm, rng.seed, f"dirac(r={d.r})"))


# ------------------------------------------------------------------------ I/O


def write_mixture_csv(d: DiracMixture, path) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("position,mass\n")
        for x, m in zip(d.positions, d.masses):
            fh.write(f"{x:.17g},{m:.17g}\n")
    return path


def read_mixture_csv(path) -> DiracMixture:
    path = Path(path)
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "position,mass":
            raise FormatError(f"{path}: expected header 'position,mass', got {header!r}")
        try:
            data = np.loadtxt(fh, delimiter=",", dtype=float, ndmin=2)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    return DiracMixture(data[:, 0], data[:, 1])
