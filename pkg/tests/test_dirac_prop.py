import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from distprop import dirac_prop as dp
from distprop.core_dist import CHALLENGE_INPUT, Gaussian, Uniform, pushforward_density, sigmoid_transform
from distprop.errors import ArgumentError, FormatError, PropagationError, SingularityError
from distprop.mc_engine import RngHandle

R_GRID = (16, 32, 64, 128, 256, 2048)

atoms = st.integers(1, 60).flatmap(
    lambda k: st.tuples(
        hnp.arrays(float, k, elements=st.floats(-1e3, 1e3, allow_nan=False)),
        hnp.arrays(float, k, elements=st.floats(1e-3, 1.0)),
    )
)


class TestDiracMixture:
    def test_validation(self):
        with pytest.raises(ArgumentError):
            dp.DiracMixture([1.0, 0.0], [0.5, 0.5])
        with pytest.raises(ArgumentError):
            dp.DiracMixture([0.0, 1.0], [0.5, 0.4])
        with pytest.raises(ArgumentError):
            dp.DiracMixture([0.0, 1.0], [1.0, 0.0])
        with pytest.raises(ArgumentError):
            dp.DiracMixture([], [])

    def test_point_and_cdf(self):
        d = dp.DiracMixture([0.0, 1.0, 2.0], [0.25, 0.5, 0.25])
        assert d.mean == 1.0
        np.testing.assert_allclose(d.cdf([-1.0, 0.0, 1.5, 2.0]), [0.0, 0.25, 0.75, 1.0])
        assert dp.DiracMixture.point(3.0).r == 1


class TestFromDist:
    def test_uniform_midpoints(self):
        assert dp.from_dist(Uniform(0, 1), 4).positions.tolist() == [0.125, 0.375, 0.625, 0.875]

    def test_equal_masses(self):
        d = dp.from_dist(Gaussian(0, 1), 64)
        assert np.all(d.masses == 1 / 64)
        assert d.mean == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("r", [0, 1, 2.5])
    def test_bad_size(self, r):
        with pytest.raises(ArgumentError):
            dp.from_dist(Uniform(0, 1), r)


class TestRequantize:
    def test_two_atoms_to_one(self):
        assert dp.requantize([0.0, 10.0], [0.5, 0.5], 1).positions.tolist() == [5.0]

    def test_fixed_point(self):
        d = dp.from_dist(CHALLENGE_INPUT, 32)
        again = dp.requantize(d.positions, d.masses, 32)
        np.testing.assert_allclose(again.positions, d.positions, rtol=0, atol=1e-12)

    def test_degenerate_input_stays_exact(self):
        assert dp.requantize([3.0, 3.0, 3.0], [0.2, 0.3, 0.5], 4).positions.tolist() == [3.0] * 4

    def test_split_atom(self):
        # one heavy atom straddles the cut between the two output buckets
        d = dp.requantize([0.0, 1.0, 2.0], [0.25, 0.5, 0.25], 2)
        assert d.positions.tolist() == [0.5, 1.5]

    def test_unsorted_input(self):
        a = dp.requantize([2.0, 0.0, 1.0, 3.0], [0.25] * 4, 2)
        assert a.positions.tolist() == [0.5, 2.5]

    def test_errors(self):
        with pytest.raises(ArgumentError):
            dp.requantize([], [], 2)
        with pytest.raises(ArgumentError):
            dp.requantize([1.0], [1.0, 2.0], 2)

    @given(atoms, st.integers(1, 40))
    @settings(max_examples=300)
    def test_conserves_mean_and_mass(self, xm, r):
        x, m = xm
        m = m / m.sum()
        d = dp.requantize(x, m, r)
        assert d.r == r
        assert math.fsum(d.masses) == pytest.approx(1.0, abs=1e-12)
        ref = math.fsum(x * m)
        scale = max(1.0, float(np.abs(x).max()))
        assert d.mean == pytest.approx(ref, abs=1e-12 * scale)

    @given(atoms, st.integers(1, 40))
    def test_output_within_input_range(self, xm, r):
        x, m = xm
        d = dp.requantize(x, m / m.sum(), r)
        assert d.positions[0] >= x.min() and d.positions[-1] <= x.max()
        assert np.all(np.diff(d.positions) >= 0)


class TestCombine:
    def test_sum_of_gaussians(self):
        g = dp.from_dist(Gaussian(0, 1), 256)
        s = dp.combine(g, g, "add")
        m = dp.moments(s)
        assert m.mean == pytest.approx(0.0, abs=1e-12)
        # midpoint quantisation shrinks the variance a little below 2
        assert 1.95 < m.variance < 2.0

    def test_product_of_uniforms(self):
        u = dp.from_dist(Uniform(1, 2), 64)
        assert dp.combine(u, u, "mul").mean == pytest.approx(2.25, abs=1e-12)

    def test_constants(self):
        c = dp.combine(dp.DiracMixture.point(3.0), dp.DiracMixture.point(4.0), "mul")
        assert c.positions.tolist() == [12.0]

    def test_sub_and_div(self):
        a = dp.from_dist(Uniform(2, 4), 32)
        b = dp.from_dist(Uniform(1, 2), 32)
        assert dp.combine(a, b, "sub").mean == pytest.approx(1.5, abs=1e-12)
        ratio = dp.combine(a, b, "div")
        assert ratio.mean == pytest.approx(a.mean * np.mean(1 / b.positions), rel=1e-12)

    def test_division_by_atom_at_zero(self):
        with pytest.raises(SingularityError):
            dp.combine(dp.from_dist(Uniform(0, 1), 4), dp.DiracMixture([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25]), "div")

    def test_unknown_op(self):
        with pytest.raises(ArgumentError):
            dp.combine(dp.DiracMixture.point(1), dp.DiracMixture.point(1), "pow")

    @given(atoms, atoms, st.integers(2, 64))
    @settings(max_examples=200)
    def test_add_preserves_means(self, a, b, r):
        d1 = dp.requantize(a[0], a[1] / a[1].sum(), max(2, a[0].size))
        d2 = dp.requantize(b[0], b[1] / b[1].sum(), max(2, b[0].size))
        s = dp.combine(d1, d2, "add", r)
        scale = max(1.0, float(np.abs(d1.positions).max() + np.abs(d2.positions).max()))
        assert s.mean == pytest.approx(d1.mean + d2.mean, abs=1e-12 * scale)


class TestUnary:
    def test_sigmoid_equivariance(self):
        sig = sigmoid_transform()
        pf = pushforward_density(CHALLENGE_INPUT, sig)
        for r in R_GRID:
            moved = dp.apply_unary(dp.from_dist(CHALLENGE_INPUT, r), sig)
            np.testing.assert_allclose(moved.positions, dp.from_dist(pf, r).positions, rtol=0, atol=1e-8)

    def test_decreasing_map_resorts(self):
        d = dp.apply_unary(dp.from_dist(Uniform(1, 2), 8), lambda x: -x)
        assert np.all(np.diff(d.positions) >= 0)

    def test_non_finite_names_the_atom(self):
        with pytest.raises(PropagationError) as exc:
            dp.apply_unary(dp.DiracMixture([0.0, 1.0], [0.5, 0.5]), np.log, path="root/log")
        assert "root/log" in str(exc.value) and "atom 0" in str(exc.value)


class TestExpressions:
    def test_affine_graph(self):
        x = dp.var("x")
        d = dp.eval_expr(3 * x + 1, {"x": dp.from_dist(Uniform(0, 1), 16)}, 16)
        assert d.mean == pytest.approx(2.5, abs=1e-12)

    def test_reuse_warns(self):
        x = dp.var("x")
        with pytest.warns(UserWarning, match="more than once"):
            dp.eval_expr(x * x, {"x": dp.from_dist(Uniform(0, 1), 8)}, 8)

    def test_integer_power_does_not_warn(self, recwarn):
        d = dp.eval_expr(dp.var("x") ** 2, {"x": dp.from_dist(Uniform(0, 1), 64)}, 64)
        assert not recwarn.list
        assert d.mean == pytest.approx(np.mean(dp.from_dist(Uniform(0, 1), 64).positions ** 2), abs=1e-15)

    def test_non_integer_power_rejected(self):
        with pytest.raises(ArgumentError):
            dp.var("x") ** 0.5

    def test_unbound_input(self):
        with pytest.raises(PropagationError, match="not bound"):
            dp.eval_expr(dp.var("y") + 1, {"x": dp.DiracMixture.point(1)}, 4)

    def test_singular_division_reports_path(self):
        expr = dp.const(1.0) / dp.var("x")
        with pytest.raises(PropagationError, match="^root: divisor"):
            dp.eval_expr(expr, {"x": dp.DiracMixture([0.0, 1.0], [0.5, 0.5])}, 4)

    def test_use_counts(self):
        x, y = dp.var("x"), dp.var("y")
        assert dp.input_use_counts(x * y + x) == {"x": 2, "y": 1}

    def test_poiseuille_graph_mean(self):
        from distprop.apps import POISEUILLE

        from . import oracles

        d = POISEUILLE.dirac(256)
        assert d.mean == pytest.approx(oracles.FLOW_MEAN, rel=2e-4)

    def test_rerun_is_bit_identical(self):
        from distprop.apps import CONVERGENCE_CHALLENGE, POISEUILLE

        for app in (CONVERGENCE_CHALLENGE, POISEUILLE):
            assert app.dirac(64).same_atoms(app.dirac(64))


class TestReadOut:
    def test_moments(self):
        m = dp.moments(dp.DiracMixture([0.0, 2.0], [0.5, 0.5]))
        assert m.mean == 1.0 and m.variance == 1.0

    def test_sample_repr_hits_only_atoms(self):
        d = dp.DiracMixture([0.0, 1.0, 5.0], [0.2, 0.3, 0.5])
        s = dp.sample_repr(d, RngHandle(1), 100_000)
        assert set(np.unique(s.values)) == {0.0, 1.0, 5.0}
        assert abs(np.mean(s.values == 5.0) - 0.5) < 0.01

    def test_csv_roundtrip(self, tmp_path):
        d = dp.from_dist(CHALLENGE_INPUT, 128)
        back = dp.read_mixture_csv(dp.write_mixture_csv(d, tmp_path / "d.csv"))
        assert back.same_atoms(d)

    def test_csv_header_checked(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("x,m\n1,1\n")
        with pytest.raises(FormatError):
            dp.read_mixture_csv(p)
