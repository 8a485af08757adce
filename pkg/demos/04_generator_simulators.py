"""Two simulated programmable generators: scale-and-shift of Gaussian noise, and a fitted ICDF."""

import numpy as np

from distprop import CHALLENGE_INPUT, LogNormal, RngHandle, wasserstein1
from distprop.mc_engine import sample_icdf
from distprop.pprvg_sim import (
    NoiseSource,
    SpotProgram,
    build_basis,
    fit_icdf,
    gfet_responses,
    grappa_sample,
    polynomial_responses,
    spot_sample,
)

n = 200_000
reference = sample_icdf(RngHandle(99), CHALLENGE_INPUT, n)

# Scale-and-shift generator. A mixture program picks one (scale, offset) per draw.
prog = SpotProgram.from_mixture(CHALLENGE_INPUT)
spot = spot_sample(NoiseSource(seed=1), prog, n, selector=RngHandle(2))
print("spot program       ", prog.components)
print(f"spot W1 to target   {wasserstein1(spot, reference).distance:.5f}")

# Recorded noise can be replayed instead of simulated.
replay = NoiseSource("file-replay", values=np.linspace(-1, 1, 5))
print("replayed          ", spot_sample(replay, SpotProgram(((1.0, 2.0, 10.0),)), 5).values)

# Fitted-ICDF generator. Orthonormalise K device responses, project the
# target quantile function onto them, and sample by evaluating the fit at
# uniform inputs.
for family in (polynomial_responses, gfet_responses):
    basis = build_basis(family(8))
    print(f"\n{family.__name__}: max |G - I| = {np.abs(basis.gram() - np.eye(8)).max():.1e}")
    for k in (2, 4, 8):
        approx = fit_icdf(build_basis(family(8), k), LogNormal(0, 1))
        print(f"  K={k}  residual {approx.residual:.4f}  downward variation {approx.nonmonotonicity:.2e}")

approx = fit_icdf(build_basis(polynomial_responses(8)), CHALLENGE_INPUT)
draws = grappa_sample(approx, RngHandle(3), n)
print(f"\nfitted-ICDF W1 to mixture {wasserstein1(draws, reference).distance:.5f}")
