"""Wasserstein-1 distances, wall-clock spans, ground truths and repetition statistics."""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import statistics
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Iterable, Literal, Sequence

import numpy as np

from . import __version__
from .dirac_prop import DiracMixture
from .errors import ArgumentError, ChecksumError, FormatError
from .mc_engine import RngHandle, SampleSet, read_samples_csv, write_samples_csv

log = logging.getLogger(__name__)

GROUND_TRUTH_SAMPLES = 1_000_000


# -------------------------------------------------------------------- Wasserstein


@dataclass(frozen=True)
class WassersteinResult:
    distance: float
    n_left: int
    n_right: int
    method: Literal["empirical-vs-empirical", "discrete-vs-empirical"]

    def __float__(self):
        return self.distance


def _values(x) -> np.ndarray:
    v = x.values if isinstance(x, SampleSet) else np.asarray(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise ArgumentError("Wasserstein distance of an empty sample")
    return v


def _sorted(v: np.ndarray) -> np.ndarray:
    if v.size > 1 and np.any(v[1:] < v[:-1]):
        return np.sort(v)
    return v


def _w1_breakpoints(a, a_cdf, b, b_cdf) -> float:
    """Integral of |F_a - F_b| over the merged breakpoints.

    a, b are sorted supports; a_cdf(idx) maps "number of atoms <= t" to F(t).
    """
    merged = np.sort(np.concatenate([a, b]), kind="mergesort")
    widths = np.diff(merged)
    fa = a_cdf(np.searchsorted(a, merged[:-1], side="right"))
    fb = b_cdf(np.searchsorted(b, merged[:-1], side="right"))
    return float(np.sum(np.abs(fa - fb) * widths))


def wasserstein1(a, b) -> WassersteinResult:
    """W1 between two empirical distributions (unequal sizes allowed)."""
    va, vb = _sorted(_values(a)), _sorted(_values(b))
    na, nb = va.size, vb.size
    d = _w1_breakpoints(va, lambda i: i / na, vb, lambda i: i / nb)
    return WassersteinResult(d, na, nb, "empirical-vs-empirical")


def wasserstein1_discrete(d: DiracMixture, b) -> WassersteinResult:
    """W1 between the atom CDF of a Dirac mixture and an empirical distribution."""
    vb = _sorted(_values(b))
    nb = vb.size
    cum = np.concatenate([[0.0], np.cumsum(d.masses)])
    cum[-1] = 1.0
    dist = _w1_breakpoints(d.positions, lambda i: cum[i], vb, lambda i: i / nb)
    return WassersteinResult(dist, d.r, nb, "discrete-vs-empirical")


def sorted_difference_w1(a, b) -> float:
    """Equal-size oracle: mean |sorted(a) - sorted(b)|."""
    va, vb = np.sort(_values(a)), np.sort(_values(b))
    if va.size != vb.size:
        raise ArgumentError("the sorted-difference formula needs equal sample sizes")
    return float(np.mean(np.abs(va - vb)))


# ------------------------------------------------------------------------ timing


@dataclass(frozen=True)
class TimerSpan:
    start_ns: int
    end_ns: int
    result: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.end_ns < self.start_ns:
            raise ArgumentError("timer span ends before it starts")

    @property
    def elapsed_ns(self) -> int:
        return self.end_ns - self.start_ns

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed_ns / 1e6


def time_block(work: Callable[[], Any]) -> TimerSpan:
    """Run ``work`` once between two monotonic clock reads; its return value is kept on the span."""
    start = time.perf_counter_ns()
    result = work()
    end = time.perf_counter_ns()
    return TimerSpan(start, end, result)


# -------------------------------------------------------------- run records


@dataclass(frozen=True)
class RunRecord:
    app: str
    method: str
    param: int
    repetition: int
    wasserstein: float
    runtime_ms: float
    seed: int


RUN_COLUMNS = [f.name for f in fields(RunRecord)]


def write_run_records(records: Iterable[RunRecord], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_COLUMNS)
        for rec in records:
            w.writerow(
                [rec.app, rec.method, rec.param, rec.repetition, f"{rec.wasserstein:.10g}", f"{rec.runtime_ms:.3f}", rec.seed]
            )
    return path


def read_run_records(path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RUN_COLUMNS:
            raise FormatError(f"{path}: expected columns {RUN_COLUMNS}, got {reader.fieldnames}")
        try:
            return [
                RunRecord(
                    row["app"],
                    row["method"],
                    int(row["param"]),
                    int(row["repetition"]),
                    float(row["wasserstein"]),
                    float(row["runtime_ms"]),
                    int(row["seed"]),
                )
                for row in reader
            ]
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class RepetitionSummary:
    records: tuple[RunRecord, ...]
    w1_mean: float
    w1_std: float
    time_mean_ms: float
    time_std_ms: float

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def app(self):
        return self.records[0].app

    @property
    def method(self):
        return self.records[0].method

    @property
    def param(self):
        return self.records[0].param


def summarize(records: Sequence[RunRecord]) -> RepetitionSummary:
    """Mean and unbiased standard deviation over repetitions of one configuration."""
    records = tuple(records)
    if len(records) < 2:
        raise ArgumentError("need at least two repetitions to summarise")
    w = [r.wasserstein for r in records]
    t = [r.runtime_ms for r in records]
    return RepetitionSummary(records, statistics.fmean(w), statistics.stdev(w), statistics.fmean(t), statistics.stdev(t))


def summarize_by_config(records: Iterable[RunRecord]) -> list[RepetitionSummary]:
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.app, rec.method, rec.param), []).append(rec)
    return [summarize(g) for _, g in sorted(groups.items())]


# ---------------------------------------------------------------- ground truth


def default_cache_dir() -> Path:
    return Path(os.environ.get("DISTPROP_CACHE_DIR", Path.home() / ".cache" / "distprop"))


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def ground_truth_path(app_id: str, seed: int, n: int = GROUND_TRUTH_SAMPLES, cache_dir=None) -> Path:
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return cache / f"gt_{app_id}_s{seed}_n{n}_v{__version__}.csv"


def generate_ground_truth(app_id: str, seed: int, n: int = GROUND_TRUTH_SAMPLES) -> SampleSet:
    from .apps import get_app

    return get_app(app_id).monte_carlo(RngHandle(seed), n)


def verify_checksum(path: Path) -> None:
    sidecar = path.with_suffix(path.suffix + ".sha256")
    if not sidecar.exists():
        raise ChecksumError(f"{path}: checksum sidecar missing")
    expected = sidecar.read_text().split()[0]
    if _sha256(path) != expected:
        raise ChecksumError(f"{path}: checksum mismatch")


def ground_truth(app_id: str, seed: int, n: int = GROUND_TRUTH_SAMPLES, cache_dir=None) -> SampleSet:
    """Monte Carlo reference output of an application, cached on disk.

    The cache key is (application, seed, sample count, package version).  A
    cache entry whose checksum does not match is regenerated.
    """
    path = ground_truth_path(app_id, seed, n, cache_dir)
    if path.exists():
        try:
            verify_checksum(path)
            return read_samples_csv(path)
        except (ChecksumError, FormatError) as exc:
            log.warning("regenerating ground truth: %s", exc)
    gt = generate_ground_truth(app_id, seed, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_samples_csv(gt, path)
    path.with_suffix(path.suffix + ".sha256").write_text(f"{_sha256(path)}  {path.name}\n")
    # reload so that callers always see exactly what is on disk
    return read_samples_csv(path)


def pooled_std(a: float, b: float) -> float:
    return math.sqrt(0.5 * (a * a + b * b))
