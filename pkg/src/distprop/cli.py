"""Command-line entry point, run as ``python -m distprop <command>``.

Exit status is 0 on success, 2 for configuration or argument problems and 3
for numerical or propagation failures.  The output directory defaults to
``$DISTPROP_OUT`` when that variable is set.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import bench, config
from .errors import ArgumentError, ChecksumError, ConfigError, FormatError, NumericalError, SourceDepletedError
from .metrics import GROUND_TRUTH_SAMPLES, ground_truth, ground_truth_path

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
OUT_ENV = "DISTPROP_OUT"


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(float(p)) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty parameter list")
    return values


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "results"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="distprop", description="distribution propagation benchmarks and demos")
    p.add_argument("-v", "--verbose", action="store_true", help="log each repetition")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="time repetitions of one application/method pair and write a CSV")
    run.add_argument("--config", type=Path, help="INI file with an [experiment] section; flags override it")
    run.add_argument("--app")
    run.add_argument("--method", choices=bench.METHODS)
    run.add_argument("--params", type=_int_list, help="n values (sampling methods) or r values (dirac-prop)")
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--delay-s", type=float, dest="delay_s")
    run.add_argument("--gt-samples", type=int, dest="gt_samples")
    run.add_argument("--w1-route", choices=("sampled", "direct"), dest="w1_route")
    run.add_argument("--grappa-k", type=int, dest="grappa_k")

    rep = sub.add_parser("report", help="Pareto SVG and summary table from run CSVs")
    rep.add_argument("csv", nargs="+", type=Path)
    rep.add_argument("--out", type=Path)
    rep.add_argument("--stem", default="pareto")

    buf = sub.add_parser("buffon", help="estimate 2/pi by dropping needles")
    buf.add_argument("--n", type=int, default=1_000_000)
    buf.add_argument("--seed", type=int, default=0)

    push = sub.add_parser("plot-pushforward", help="input pdf, transform and analytic output pdf as SVG")
    push.add_argument("--app", default="convergence-challenge")
    push.add_argument("--out", type=Path)

    fit = sub.add_parser("pprvg-fit", help="fit the Spot and Grappa simulators to a named target")
    fit.add_argument("--target", required=True)
    fit.add_argument("--k", type=int, default=8)
    fit.add_argument("--n", type=int, default=100_000)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--family", choices=("polynomial", "gfet"), default="polynomial")

    gt = sub.add_parser("ground-truth", help="generate or verify a cached ground truth")
    gt.add_argument("--app", required=True)
    gt.add_argument("--seed", type=int, default=0)
    gt.add_argument("--gt-samples", type=int, default=GROUND_TRUTH_SAMPLES, dest="gt_samples")
    return p


def _experiment_config(args) -> bench.ExperimentConfig:
    opts: dict = {}
    if args.config is not None:
        opts.update(config.experiment_options(config.load(args.config)))
    for key in ("app", "method", "params", "reps", "seed", "out", "delay_s", "gt_samples", "w1_route", "grappa_k"):
        value = getattr(args, key)
        if value is not None:
            opts[key] = value
    opts.setdefault("out", _default_out())
    missing = [k for k in ("app", "method", "params") if k not in opts]
    if missing:
        raise ConfigError("missing " + ", ".join("--" + m for m in missing))
    if "params" in opts and isinstance(opts["params"], list):
        opts["params"] = tuple(opts["params"])
    return bench.ExperimentConfig(**opts)


def _cmd_run(args) -> int:
    cfg = _experiment_config(args)
    progress = print if args.verbose else None
    try:
        result = bench.run_experiment(cfg, progress=progress)
    except NumericalError as exc:
        raise NumericalError(f"{cfg.label} params={list(cfg.params)}: {exc}") from exc
    print(bench.format_table(result.summaries()) if cfg.reps >= 2 else f"{len(result.records)} rows")
    print(f"wrote {result.csv_path}")
    for r, path in sorted(result.representation_paths.items()):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    rep = bench.report_pareto(args.csv, args.out or _default_out(), args.stem)
    print(rep.table, end="")
    for t in rep.trends:
        print(t.describe())
    print(f"wrote {rep.svg_path}")
    print(f"wrote {rep.table_path}")
    return EXIT_OK


def _cmd_buffon(args) -> int:
    res = bench.buffon(args.n, args.seed)
    print(f"crossing fraction {res.estimate:.6f}  (2/pi = 0.636620, error {res.error:+.6f}, pi ~ {res.pi_estimate:.5f})")
    return EXIT_OK


def _cmd_pushforward(args) -> int:
    plot = bench.pushforward_plot(args.app, args.out or _default_out())
    print("output density modes: " + ", ".join(f"{m:.4f}" for m in plot.modes))
    print("images of input modes: " + ", ".join(f"{m:.4f}" for m in plot.mode_images))
    print(f"wrote {plot.path}")
    return EXIT_OK


def _cmd_pprvg_fit(args) -> int:
    fit = bench.pprvg_fit(args.target, args.k, args.n, args.seed, args.family)
    print("\n".join(fit.lines()))
    return EXIT_OK


def _cmd_ground_truth(args) -> int:
    seed = args.seed
    gt = ground_truth(args.app, seed, args.gt_samples)
    print(f"{ground_truth_path(args.app, seed, args.gt_samples)}  n={gt.n}  mean={gt.values.mean():.8g}")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "report": _cmd_report,
    "buffon": _cmd_buffon,
    "plot-pushforward": _cmd_pushforward,
    "pprvg-fit": _cmd_pprvg_fit,
    "ground-truth": _cmd_ground_truth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ArgumentError, FormatError, ChecksumError, SourceDepletedError) as exc:
        print(f"distprop {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"distprop {args.command}: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
