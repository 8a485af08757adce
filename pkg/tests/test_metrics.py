import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from distprop import dirac_prop as dp
from distprop.core_dist import Gaussian, Uniform, challenge_output_density
from distprop.errors import ArgumentError, ChecksumError, FormatError
from distprop.mc_engine import RngHandle, sample
from distprop.metrics import (
    RUN_COLUMNS,
    RunRecord,
    TimerSpan,
    _sha256,
    ground_truth,
    ground_truth_path,
    read_run_records,
    sorted_difference_w1,
    summarize,
    summarize_by_config,
    time_block,
    verify_checksum,
    wasserstein1,
    wasserstein1_discrete,
    write_run_records,
)

from . import oracles

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=80)


class TestWasserstein:
    def test_identity(self):
        a = np.array([0.3, -1.0, 2.0])
        assert wasserstein1(a, a).distance == 0.0

    def test_point_masses(self):
        assert wasserstein1([0.0], [1.0]).distance == 1.0

    def test_unequal_sizes_against_scipy(self, np_rng):
        a, b = np_rng.normal(size=700), np_rng.exponential(size=333)
        assert wasserstein1(a, b).distance == pytest.approx(stats.wasserstein_distance(a, b), rel=1e-12)

    def test_translation_by_one(self):
        n = 10**6
        a = sample(RngHandle(1), Gaussian(0, 1), n)
        b = sample(RngHandle(2), Gaussian(1, 1), n)
        d = wasserstein1(a, b).distance
        assert d == pytest.approx(1.0, abs=0.01)
        assert d == pytest.approx(sorted_difference_w1(a, b), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ArgumentError):
            wasserstein1([], [1.0])

    def test_result_fields(self):
        r = wasserstein1(np.arange(5.0), np.arange(3.0))
        assert (r.n_left, r.n_right, r.method) == (5, 3, "empirical-vs-empirical")
        assert float(r) == r.distance

    @given(samples, samples)
    def test_symmetric(self, a, b):
        assert wasserstein1(a, b).distance == wasserstein1(b, a).distance

    @given(samples, st.floats(-100, 100))
    def test_translation(self, a, c):
        a = np.array(a)
        assert wasserstein1(a, a + c).distance == pytest.approx(abs(c), abs=1e-9 * max(1, np.abs(a).max()))

    @given(samples, samples, st.floats(-10, 10))
    def test_scale_covariance(self, a, b, k):
        a, b = np.array(a), np.array(b)
        base = wasserstein1(a, b).distance
        assert wasserstein1(k * a, k * b).distance == pytest.approx(abs(k) * base, rel=1e-12, abs=1e-9)

    @given(st.integers(1, 60).flatmap(lambda n: st.tuples(*[st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n)] * 2)))
    def test_matches_sorted_difference(self, ab):
        a, b = ab
        assert wasserstein1(a, b).distance == pytest.approx(sorted_difference_w1(a, b), rel=1e-12, abs=1e-12)

    @given(samples, samples, samples)
    @settings(max_examples=200)
    def test_triangle(self, a, b, c):
        d = lambda x, y: wasserstein1(x, y).distance  # noqa: E731
        assert d(a, c) <= d(a, b) + d(b, c) + 1e-9


class TestDiscreteWasserstein:
    def test_single_atom(self):
        assert wasserstein1_discrete(dp.DiracMixture.point(2.5), [2.5]).distance == 0.0

    def test_atoms_as_samples(self):
        d = dp.from_dist(Uniform(0, 1), 64)
        assert wasserstein1_discrete(d, d.positions).distance == pytest.approx(0.0, abs=1e-15)

    def test_weighted_atoms(self):
        d = dp.DiracMixture([0.0, 1.0], [0.25, 0.75])
        # empirical {0, 1, 1, 1} has the same CDF
        assert wasserstein1_discrete(d, [1.0, 0.0, 1.0, 1.0]).distance == 0.0
        assert wasserstein1_discrete(d, [0.0, 1.0]).distance == pytest.approx(0.25)

    @pytest.mark.slow
    def test_agrees_with_sampling_route(self):
        d = dp.from_dist(Gaussian(0, 1), 32)
        gt = np.sort(sample(RngHandle(0), Gaussian(0, 1), 10**6).values)
        direct = wasserstein1_discrete(d, gt).distance
        routed = [wasserstein1(dp.sample_repr(d, RngHandle(s), 10**6), gt).distance for s in range(30)]
        se = statistics.stdev(routed) / math.sqrt(30)
        assert abs(direct - statistics.fmean(routed)) <= 3 * se

    def test_empty_rejected(self):
        with pytest.raises(ArgumentError):
            wasserstein1_discrete(dp.DiracMixture.point(1.0), [])


class TestTiming:
    def test_empty_block(self):
        span = time_block(lambda: None)
        assert 0 <= span.elapsed_ms < 1

    def test_result_is_kept(self):
        assert time_block(lambda: 42).result == 42

    def test_exact_conversion(self):
        assert TimerSpan(1_000, 2_501_000).elapsed_ms == 2.5

    def test_end_before_start(self):
        with pytest.raises(ArgumentError):
            TimerSpan(10, 5)

    def test_busy_loop_is_stable(self):
        def busy():
            s = 0
            for i in range(200_000):
                s += i
            return s

        time_block(busy)
        a, b = time_block(busy).elapsed_ns, time_block(busy).elapsed_ns
        assert max(a, b) / min(a, b) < 3

    def test_nested_spans_sum_to_outer(self):
        def step():
            x = np.random.default_rng(0).random(300_000)
            return np.sort(x)

        inner = []

        def outer():
            for _ in range(4):
                inner.append(time_block(step))

        step()
        total = time_block(outer).elapsed_ns
        assert sum(s.elapsed_ns for s in inner) == pytest.approx(total, rel=0.05)


class TestSummaries:
    def _records(self, values, times=None):
        times = times or [1.0] * len(values)
        return [RunRecord("a", "m", 4, i, v, t, i) for i, (v, t) in enumerate(zip(values, times))]

    def test_hand_computation(self):
        s = summarize(self._records([1.0, 3.0]))
        assert s.w1_mean == 2.0 and s.w1_std == pytest.approx(math.sqrt(2))

    def test_identical(self):
        assert summarize(self._records([0.5] * 5)).w1_std == 0.0

    def test_needs_two(self):
        with pytest.raises(ArgumentError):
            summarize(self._records([1.0]))

    def test_gaussian_records(self):
        vals = RngHandle(3)._gen.normal(5.0, 2.0, 30)
        s = summarize(self._records(list(vals)))
        assert abs(s.w1_mean - 5.0) <= 3 * 2.0 / math.sqrt(30)
        assert s.count == 30

    def test_group_by_configuration(self):
        recs = self._records([1.0, 2.0]) + [RunRecord("a", "m", 8, i, 0.1, 1.0, 0) for i in range(3)]
        groups = summarize_by_config(recs)
        assert [g.param for g in groups] == [4, 8] and [g.count for g in groups] == [2, 3]

    def test_csv_roundtrip(self, tmp_path):
        recs = self._records([0.00123456789, 2.0], [0.5, 1.25])
        back = read_run_records(write_run_records(recs, tmp_path / "r.csv"))
        assert back == recs
        assert (tmp_path / "r.csv").read_text().splitlines()[0] == ",".join(RUN_COLUMNS)

    def test_csv_schema_mismatch(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("app,method,param\nx,y,1\n")
        with pytest.raises(FormatError):
            read_run_records(p)


class TestGroundTruth:
    def test_cached_file_is_stable(self, tmp_path):
        a = ground_truth("convergence-challenge", 5, 20_000, tmp_path)
        path = ground_truth_path("convergence-challenge", 5, 20_000, tmp_path)
        digest = _sha256(path)
        b = ground_truth("convergence-challenge", 5, 20_000, tmp_path)
        assert _sha256(path) == digest
        assert np.array_equal(a.values, b.values)

    def test_reload_is_bit_exact(self, tmp_path):
        from distprop.metrics import generate_ground_truth

        fresh = generate_ground_truth("poiseuille", 9, 5_000)
        cached = ground_truth("poiseuille", 9, 5_000, tmp_path)
        assert np.array_equal(fresh.values, cached.values)

    def test_corruption_is_detected_and_repaired(self, tmp_path):
        good = ground_truth("convergence-challenge", 1, 1_000, tmp_path)
        path = ground_truth_path("convergence-challenge", 1, 1_000, tmp_path)
        path.write_text(path.read_text().replace("0.", "9.", 1))
        with pytest.raises(ChecksumError):
            verify_checksum(path)
        again = ground_truth("convergence-challenge", 1, 1_000, tmp_path)
        assert np.array_equal(again.values, good.values)
        verify_checksum(path)

    def test_key_includes_version(self, tmp_path):
        from distprop import __version__

        assert f"_v{__version__}" in ground_truth_path("poiseuille", 0, 10, tmp_path).name

    def test_unknown_application(self, tmp_path):
        from distprop.errors import ConfigError

        with pytest.raises(ConfigError):
            ground_truth("pendulum", 0, 10, tmp_path)

    @pytest.mark.slow
    def test_challenge_mean_matches_quadrature(self, gt_cache):
        gt = ground_truth("convergence-challenge", 0, cache_dir=gt_cache)
        sd = math.sqrt(oracles.SIGMOID_OUTPUT_VAR)
        assert abs(gt.values.mean() - challenge_output_density().mean) <= 3 * sd / math.sqrt(gt.n)

    @pytest.mark.slow
    def test_flow_mean_reproducible_across_seeds(self, gt_cache):
        a = ground_truth("poiseuille", 0, cache_dir=gt_cache).values.mean()
        b = ground_truth("poiseuille", 1, cache_dir=gt_cache).values.mean()
        assert abs(a - b) <= 0.001
        assert abs(a - oracles.FLOW_MEAN) <= 3 * oracles.FLOW_SD / 1000
