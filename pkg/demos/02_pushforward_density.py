"""The exact output density of a monotone model, and how it compares with sampling.

Writes ``pushforward.svg`` into the current directory.
"""

from distprop import CHALLENGE_INPUT, RngHandle, pushforward_density, sigmoid_transform, wasserstein1
from distprop.apps import CONVERGENCE_CHALLENGE
from distprop.bench import pushforward_plot
from distprop.core_dist import density_modes
from distprop.mc_engine import sample_icdf

sig = sigmoid_transform()
density = pushforward_density(CHALLENGE_INPUT, sig)

# Change of variables gives a density that integrates to one
# without any sampling.
print(f"total mass        {density.integrate():.12f}")
print(f"exact output mean {density.mean:.6f}")

# The maxima of the output density do not sit at the images of the input modes:
# the Jacobian factor moves them.
modes = density_modes(density)
print("output modes      ", [round(float(m), 4) for m in modes])
print("images of modes   ", [round(float(sig(m)), 4) for m in CHALLENGE_INPUT.means[::-1]])

# Samples of the model and samples of the exact density agree.
n = 200_000
mc = CONVERGENCE_CHALLENGE.monte_carlo(RngHandle(1), n)
exact = sample_icdf(RngHandle(2), density, n)
print(f"W1(model samples, density samples) = {wasserstein1(mc, exact).distance:.5f}")

plot = pushforward_plot("convergence-challenge", ".")
print("wrote", plot.path)
