"""A small accuracy-versus-runtime benchmark, written to CSV and summarised as an SVG.

The same thing from a shell::

    python -m distprop run --app poiseuille --method monte-carlo --params 4096,32000 --reps 5 --out results
    python -m distprop run --app poiseuille --method dirac-prop --params 16,64,256 --reps 5 --out results
    python -m distprop report results/*.csv --out results
"""

from pathlib import Path

from distprop import bench

out = Path("results")
common = dict(app="poiseuille", reps=5, seed=7, out=out, gt_samples=200_000)
runs = [
    bench.ExperimentConfig(method="monte-carlo", params=(1152, 4096, 32_000), **common),
    bench.ExperimentConfig(method="dirac-prop", params=(16, 64, 256), w1_route="direct", **common),
    bench.ExperimentConfig(method="grappa", params=(4096, 32_000), **common),
]
paths = [bench.run_experiment(cfg, progress=print).csv_path for cfg in runs]

report = bench.report_pareto(paths, out)
print()
print(report.table)
for trend in report.trends:
    print(trend.describe())
print("figure:", report.svg_path)
