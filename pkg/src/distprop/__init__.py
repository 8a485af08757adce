"""Uncertainty propagation by Monte Carlo sampling and by deterministic Dirac-mixture arithmetic."""

__version__ = "0.1.0"

from .core_dist import (  # noqa: E402
    CHALLENGE_INPUT,
    AnalyticDensity,
    Bernoulli,
    Exponential,
    Gaussian,
    GaussianMixture,
    LogNormal,
    ParametricDist,
    Transform,
    Uniform,
    expectation,
    pushforward_density,
    sigmoid_transform,
)
from .dirac_prop import DiracMixture, combine, eval_expr, from_dist, requantize  # noqa: E402
from .mc_engine import RngHandle, SampleSet, SummaryStats  # noqa: E402
from .metrics import wasserstein1, wasserstein1_discrete  # noqa: E402

__all__ = [
    "AnalyticDensity",
    "Bernoulli",
    "CHALLENGE_INPUT",
    "DiracMixture",
    "Exponential",
    "Gaussian",
    "GaussianMixture",
    "LogNormal",
    "ParametricDist",
    "RngHandle",
    "SampleSet",
    "SummaryStats",
    "Transform",
    "Uniform",
    "combine",
    "eval_expr",
    "expectation",
    "from_dist",
    "pushforward_density",
    "requantize",
    "sigmoid_transform",
    "wasserstein1",
    "wasserstein1_discrete",
]
