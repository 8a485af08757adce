"""Deterministic Dirac-mixture propagation against Monte Carlo on the same models."""

import time

import numpy as np

from distprop import Gaussian, Uniform, from_dist, wasserstein1, wasserstein1_discrete
from distprop import dirac_prop as dp
from distprop.apps import CONVERGENCE_CHALLENGE, POISEUILLE
from distprop.mc_engine import RngHandle
from distprop.metrics import ground_truth

# A Dirac mixture is r weighted atoms. Quantile midpoints give the
# best r-atom approximation in W1.
d = from_dist(Uniform(0, 1), 4)
print("uniform, r=4:", d.positions)

# Arithmetic on mixtures: all pairwise sums, then requantise back to r atoms.
g = from_dist(Gaussian(0, 1), 256)
s = dp.combine(g, g, "add")
print(f"N(0,1)+N(0,1): mean {dp.moments(s).mean:+.2e}, variance {dp.moments(s).variance:.4f}")

# Expression graphs. Reusing an input inside one expression warns, because
# independent copies would be combined as if they were different variables.
x, y = dp.var("x"), dp.var("y")
out = dp.eval_expr(3 * x + y, {"x": from_dist(Uniform(0, 1), 64), "y": from_dist(Gaussian(0, 1), 64)}, 64)
print(f"3U+N mean {out.mean:.6f}")

# Accuracy and cost on both benchmark models against a large reference.
for app in (CONVERGENCE_CHALLENGE, POISEUILLE):
    gt = np.sort(ground_truth(app.name, 0, 200_000).values)
    print(f"\n{app.name}: {app.description}")
    for r in (16, 64, 256, 2048):
        app.dirac(r)
        t = time.perf_counter()
        mix = app.dirac(r)
        ms = 1e3 * (time.perf_counter() - t)
        print(f"  dirac r={r:>5}  W1 {wasserstein1_discrete(mix, gt).distance:.5f}  {ms:7.3f} ms")
    for n in (4096, 32_000):
        t = time.perf_counter()
        smp = app.monte_carlo(RngHandle(n), n)
        ms = 1e3 * (time.perf_counter() - t)
        print(f"  mc  n={n:>6}  W1 {wasserstein1(smp, gt).distance:.5f}  {ms:7.3f} ms")
