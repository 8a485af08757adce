"""Monte Carlo from the ground up: seeded streams, sampling, evaluation, post-processing.

Run with ``python demos/01_monte_carlo_basics.py``.
"""

import math

from distprop import CHALLENGE_INPUT, Gaussian, RngHandle, sigmoid_transform
from distprop.mc_engine import buffon_estimate, derive_seed, evaluate, post_process, sample

# Every random number comes from a named Philox stream. The same seed
# always gives the same values, on any machine.
rng = RngHandle(derive_seed(2024, "demo"))
print("first uniforms:", RngHandle(7).random(3))

# Sampling stage: draw from the bimodal input.
x = sample(rng, CHALLENGE_INPUT, 200_000)
print(f"input mean  {x.values.mean():.4f}  (exact {CHALLENGE_INPUT.mean:.4f})")

# Evaluation stage: push every draw through the model.
y = evaluate(x, sigmoid_transform())

# Post-processing stage. The same samples serve three purposes.
stats = post_process(y, "mean")
print(f"output mean {stats.mean:.4f} +- {stats.std / math.sqrt(stats.count):.4f}")
hist = post_process(y, "histogram", bins=8)
print("histogram counts:", hist.counts.tolist())

# Buffon's needle: the crossing rate of a unit needle on unit-spaced lines is 2/pi.
for n in (1_000, 100_000, 1_000_000):
    p = buffon_estimate(RngHandle(n), n)
    print(f"n={n:>9}  crossing rate {p:.5f}  |error| {abs(p - 2 / math.pi):.5f}")

# Error shrinks like 1/sqrt(n): a Gaussian mean check.
for n in (100, 10_000, 1_000_000):
    m = sample(RngHandle(1), Gaussian(3.0, 2.0), n).values.mean()
    print(f"n={n:>9}  mean error {abs(m - 3.0):.5f}  (1/sqrt(n) scale {2 / math.sqrt(n):.5f})")
