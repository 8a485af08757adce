import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from distprop.core_dist import (
    CHALLENGE_INPUT,
    AnalyticDensity,
    Bernoulli,
    Exponential,
    Gaussian,
    GaussianMixture,
    LogNormal,
    Uniform,
    affine,
    challenge_output_density,
    density_modes,
    exp_transform,
    expectation,
    identity,
    poiseuille_flow,
    power,
    pushforward_density,
    reciprocal,
    sigmoid_transform,
)
from distprop.errors import ArgumentError, DomainError, SingularityError, UnsupportedTransformError

from . import oracles

finite = st.floats(-50, 50, allow_nan=False)
positive = st.floats(0.05, 20, allow_nan=False)
interior_u = st.floats(1e-9, 1 - 1e-9, allow_nan=False)


class TestGaussian:
    def test_standard_pdf_at_zero(self):
        assert Gaussian(0, 1).pdf(0.0) == pytest.approx(oracles.INV_SQRT_2PI, abs=1e-16)

    def test_median_and_tails(self):
        g = Gaussian(3.0, 2.0)
        assert g.icdf(0.5) == 3.0
        assert g.cdf(3.0) == 0.5
        assert g.icdf(stats.norm.cdf(1.0)) == pytest.approx(5.0, abs=1e-12)

    def test_rejects_nonpositive_sigma(self):
        with pytest.raises(ArgumentError):
            Gaussian(0.0, 0.0)

    @given(mu=finite, sigma=positive, u=interior_u)
    def test_cdf_inverts_icdf(self, mu, sigma, u):
        g = Gaussian(mu, sigma)
        assert g.cdf(g.icdf(u)) == pytest.approx(u, rel=1e-9, abs=1e-15)


class TestUniform:
    def test_quantiles(self):
        d = Uniform(2.0, 6.0)
        assert d.icdf(0.25) == 3.0
        assert d.cdf(5.0) == 0.75
        assert d.pdf(4.0) == 0.25
        assert d.pdf(7.0) == 0.0

    def test_empty_interval_rejected(self):
        with pytest.raises(ArgumentError):
            Uniform(1.0, 1.0)

    @given(lo=finite, width=positive, u=interior_u)
    def test_icdf_stays_inside(self, lo, width, u):
        d = Uniform(lo, lo + width)
        x = d.icdf(u)
        assert lo <= x <= lo + width


class TestMixture:
    def test_pdf_oracle(self):
        assert CHALLENGE_INPUT.pdf(2.0) == pytest.approx(oracles.MIXTURE_PDF_AT_2, rel=1e-14)

    def test_icdf_oracle(self):
        assert CHALLENGE_INPUT.icdf(0.9) == pytest.approx(oracles.MIXTURE_ICDF_AT_0_9, abs=1e-10)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ArgumentError):
            GaussianMixture(((0.5, 0, 1), (0.4, 1, 1)))

    def test_single_component_matches_gaussian(self):
        u = np.linspace(0.01, 0.99, 41)
        np.testing.assert_allclose(GaussianMixture(((1.0, 1.5, 0.7),)).icdf(u), Gaussian(1.5, 0.7).icdf(u), atol=1e-10)

    @given(u=interior_u)
    @settings(max_examples=200)
    def test_icdf_roundtrip(self, u):
        assert CHALLENGE_INPUT.cdf(CHALLENGE_INPUT.icdf(u)) == pytest.approx(u, abs=1e-12)

    def test_icdf_is_monotone(self):
        u = np.linspace(1e-6, 1 - 1e-6, 5001)
        assert np.all(np.diff(CHALLENGE_INPUT.icdf(u)) > 0)

    def test_mean(self):
        assert CHALLENGE_INPUT.mean == pytest.approx(0.6 * 2 - 0.4 * 1, abs=1e-15)


class TestBernoulli:
    def test_pmf_and_threshold_icdf(self):
        b = Bernoulli(0.3)
        assert b.pdf(1.0) == pytest.approx(0.3)
        assert b.pdf(0.0) == pytest.approx(0.7)
        assert b.icdf(0.7) == 0.0
        assert b.icdf(0.7000001) == 1.0
        assert b.discrete

    def test_expectation_is_a_sum(self):
        assert expectation(Bernoulli(0.25)) == 0.25


class TestHeavyTailedExtras:
    def test_lognormal_against_scipy(self):
        d = LogNormal(0.2, 0.8)
        ref = stats.lognorm(s=0.8, scale=math.exp(0.2))
        x = np.array([0.1, 1.0, 3.0])
        np.testing.assert_allclose(d.pdf(x), ref.pdf(x), rtol=1e-13)
        np.testing.assert_allclose(d.icdf([0.1, 0.5, 0.99]), ref.ppf([0.1, 0.5, 0.99]), rtol=1e-13)
        assert d.mean == pytest.approx(ref.mean(), rel=1e-14)

    def test_exponential_against_scipy(self):
        d = Exponential(2.5)
        ref = stats.expon(scale=0.4)
        np.testing.assert_allclose(d.cdf([0.1, 1.0]), ref.cdf([0.1, 1.0]), rtol=1e-14)
        np.testing.assert_allclose(d.icdf([0.2, 0.9]), ref.ppf([0.2, 0.9]), rtol=1e-14)


def test_icdf_outside_unit_interval_is_a_domain_error():
    for d in (Gaussian(0, 1), Uniform(0, 1), CHALLENGE_INPUT):
        with pytest.raises(DomainError):
            d.icdf(1.5)
        with pytest.raises(DomainError):
            d.icdf(-0.1)


class TestTransforms:
    def test_sigmoid_oracle(self):
        assert sigmoid_transform()(3.0) == pytest.approx(oracles.SIGMOID_AT_3, rel=1e-15)

    @given(x=st.floats(-30, 30))
    def test_sigmoid_inverse(self, x):
        s = sigmoid_transform()
        assert s.inverse(s(x)) == pytest.approx(x, abs=1e-8 * max(1.0, math.exp(abs(x) - 1)))

    def test_factories_carry_monotonicity(self):
        assert affine(2, 1).monotonicity == "increasing"
        assert affine(-2, 1).monotonicity == "decreasing"
        assert reciprocal().monotonicity == "decreasing"
        assert not power(2).monotone
        assert power(3).monotone
        assert identity()(4.0) == 4.0

    def test_flow_at_mean_inputs(self):
        assert poiseuille_flow(5.5e6, 4.0, 7.0, 0.085) == pytest.approx(oracles.FLOW_AT_MEAN_INPUTS, rel=1e-15)


class TestExpectation:
    def test_sigmoid_output_mean_and_variance(self):
        s = sigmoid_transform()
        mean = expectation(CHALLENGE_INPUT, s)
        var = expectation(CHALLENGE_INPUT, lambda x: (s(x) - mean) ** 2)
        assert mean == pytest.approx(oracles.SIGMOID_OUTPUT_MEAN, abs=1e-9)
        assert var == pytest.approx(oracles.SIGMOID_OUTPUT_VAR, abs=1e-9)

    def test_gaussian_second_moment(self):
        assert expectation(Gaussian(1.0, 2.0), lambda x: x * x) == pytest.approx(5.0, abs=1e-9)

    def test_uniform_identity(self):
        assert expectation(Uniform(3.88, 4.12)) == pytest.approx(4.0, abs=1e-12)


class TestPushforward:
    def test_closed_form_and_generic_agree(self):
        generic = pushforward_density(CHALLENGE_INPUT, sigmoid_transform())
        closed = challenge_output_density()
        y = np.linspace(1e-6, 1 - 1e-6, 2001)
        np.testing.assert_allclose(generic.pdf(y), closed.pdf(y), rtol=1e-12, atol=1e-300)

    def test_integrates_to_one(self):
        assert challenge_output_density().integrate() == pytest.approx(1.0, abs=1e-9)

    def test_exponent_without_factor_two_does_not_normalise(self):
        # with exp(-(logit - 2)^2) in the first term the mass is 0.6 * sqrt(2) + 0.4
        def variant(y):
            lg = 1.0 + math.log(y / (1.0 - y))
            mix = 0.6 / (0.5 * math.sqrt(2 * math.pi)) * math.exp(-((lg - 2.0) ** 2)) + 0.4 / math.sqrt(
                2 * math.pi
            ) * math.exp(-((lg + 1.0) ** 2) / 2)
            return mix / (y * (1.0 - y))

        mass = integrate.quad(variant, 0, 1, limit=500, points=[0.05, 0.12, 0.73])[0]
        assert mass == pytest.approx(oracles.UNCORRECTED_OUTPUT_MASS, abs=1e-4)

    def test_endpoints_have_zero_density(self):
        d = challenge_output_density()
        assert d.pdf(0.0) == 0.0 and d.pdf(1.0) == 0.0 and d.pdf(1.5) == 0.0

    def test_mean_matches_lotus(self):
        assert challenge_output_density().mean == pytest.approx(oracles.SIGMOID_OUTPUT_MEAN, abs=1e-9)

    def test_modes(self):
        modes = density_modes(challenge_output_density())
        assert len(modes) == 2
        np.testing.assert_allclose(modes, oracles.SIGMOID_OUTPUT_MODES, atol=2e-4)

    def test_affine_pushforward_of_gaussian_is_gaussian(self):
        d = pushforward_density(Gaussian(1.0, 2.0), affine(-3.0, 4.0))
        y = np.linspace(-20, 20, 101)
        np.testing.assert_allclose(d.pdf(y), Gaussian(1.0, 6.0).pdf(y), rtol=1e-12, atol=1e-300)

    def test_exp_of_gaussian_is_lognormal(self):
        d = pushforward_density(Gaussian(0.3, 0.5), exp_transform())
        y = np.linspace(0.05, 8, 50)
        np.testing.assert_allclose(d.pdf(y), LogNormal(0.3, 0.5).pdf(y), rtol=1e-12)
        np.testing.assert_allclose(d.cdf(y), LogNormal(0.3, 0.5).cdf(y), atol=1e-10)

    def test_cdf_icdf_pair(self):
        d = challenge_output_density()
        u = np.linspace(0.001, 0.999, 97)
        np.testing.assert_allclose(d.cdf(d.icdf(u)), u, atol=1e-11)

    @given(u=st.floats(1e-6, 1 - 1e-6))
    @settings(max_examples=100, deadline=None)
    def test_icdf_is_the_sigmoid_of_the_input_icdf(self, u):
        # monotone increasing map: quantiles commute with the transform
        d = challenge_output_density()
        assert d.icdf(u) == pytest.approx(sigmoid_transform()(CHALLENGE_INPUT.icdf(u)), abs=1e-9)

    def test_non_monotone_rejected(self):
        with pytest.raises(UnsupportedTransformError):
            pushforward_density(Gaussian(0, 1), power(2))

    def test_missing_inverse_rejected(self):
        with pytest.raises(UnsupportedTransformError):
            pushforward_density(Gaussian(0, 1), affine(0.0, 1.0))

    def test_discrete_input_rejected(self):
        with pytest.raises(UnsupportedTransformError):
            pushforward_density(Bernoulli(0.5), identity())

    def test_vanishing_derivative_is_a_singularity(self):
        d = pushforward_density(Gaussian(0, 1), power(3))
        with pytest.raises(SingularityError):
            d.pdf(0.0)


def test_analytic_density_from_a_plain_function():
    d = AnalyticDensity(lambda y: 2.0 * np.asarray(y), (0.0, 1.0), name="triangle")
    assert d.integrate() == pytest.approx(1.0, abs=1e-12)
    assert d.cdf(0.5) == pytest.approx(0.25, abs=1e-12)
    assert d.icdf(0.25) == pytest.approx(0.5, abs=1e-10)
