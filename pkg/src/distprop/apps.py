"""Built-in benchmark applications.

Each application carries its input distributions, a vectorised evaluation
for the sampling path and an expression graph for the Dirac path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import dirac_prop as dp
from .core_dist import CHALLENGE_INPUT, Gaussian, ParametricDist, Uniform, poiseuille_flow, sigmoid_transform
from .errors import ConfigError
from .mc_engine import RngHandle, SampleSet, evaluate_multi, needle_crosses, sample


@dataclass(frozen=True)
class AppSpec:
    name: str
    inputs: Mapping[str, ParametricDist]
    mc_eval: Callable[..., np.ndarray]
    expr: dp.ExprNode | None = None
    units: str = ""
    description: str = ""
    default_mc_params: tuple[int, ...] = ()
    default_dirac_params: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)

    def monte_carlo(self, rng: RngHandle, n: int) -> SampleSet:
        """Sampling and evaluation stages for n joint draws (inputs drawn in declaration order)."""
        draws = {name: sample(rng, dist, n) for name, dist in self.inputs.items()}
        return evaluate_multi(draws, self.mc_eval)

    def dirac_inputs(self, r: int) -> dict[str, dp.DiracMixture]:
        return {name: dp.from_dist(dist, r) for name, dist in self.inputs.items()}

    def dirac(self, r: int) -> dp.DiracMixture:
        """Initialisation plus propagation at representation size r."""
        if self.expr is None:
            raise ConfigError(f"application {self.name!r} has no expression graph for Dirac propagation")
        return dp.eval_expr(self.expr, self.dirac_inputs(r), r)


_sigmoid = sigmoid_transform()


def _challenge_eval(x):
    return _sigmoid(x)


_challenge_eval.__name__ = "sigmoid"


def _poiseuille_eval(dp, mu, length, radius):
    return poiseuille_flow(dp, mu, length, radius)


_poiseuille_eval.__name__ = "poiseuille"


def _buffon_eval(offset, angle):
    return needle_crosses(offset, angle).astype(float)


_buffon_eval.__name__ = "crosses"


CONVERGENCE_CHALLENGE = AppSpec(
    name="convergence-challenge",
    inputs={"x": CHALLENGE_INPUT},
    mc_eval=_challenge_eval,
    expr=dp.apply_monotone(dp.var("x"), _sigmoid),
    units="",
    description="bimodal Gaussian mixture through a logistic sigmoid",
    default_mc_params=(4, 256, 1152, 2048, 4096, 8192, 16000, 32000, 128000, 256000),
    default_dirac_params=(16, 32, 64, 256, 2048),
)

POISEUILLE = AppSpec(
    name="poiseuille",
    inputs={
        "dp": Gaussian(5_500_000.0, 36_000.0),  # mPa
        "mu": Uniform(3.88, 4.12),  # mPa*s
        "length": Uniform(6.95, 7.05),  # cm
        "radius": Uniform(0.0845, 0.0855),  # cm
    },
    mc_eval=_poiseuille_eval,
    expr=dp.affine_node(dp.var("radius") ** 4 * dp.var("dp") / (dp.var("mu") * dp.var("length")), math.pi / 8.0),
    units="cm^3/s",
    description="laminar blood flow through a cannula, pi r^4 dP / (8 mu l)",
    default_mc_params=(4, 256, 1152, 4096, 8192, 32000, 128000, 256000, 512000, 640000),
    default_dirac_params=(16, 32, 64, 128, 256, 2048),
)

BUFFON = AppSpec(
    name="buffon",
    inputs={"offset": Uniform(0.0, 0.5), "angle": Uniform(0.0, 0.5 * math.pi)},
    mc_eval=_buffon_eval,
    expr=None,
    description="needle crossing indicator; its mean estimates 2/pi",
    default_mc_params=(256, 4096, 32000, 128000, 1_000_000),
)

APPS: dict[str, AppSpec] = {a.name: a for a in (CONVERGENCE_CHALLENGE, POISEUILLE, BUFFON)}


def get_app(name: str) -> AppSpec:
    try:
        return APPS[name]
    except KeyError:
        raise ConfigError(f"unknown application {name!r}; choose from {sorted(APPS)}") from None
