"""Declarative INI-style configs for distributions, Spot programs and experiments.

A distribution section names a family and its parameters::

    [distribution:x]
    family = mixture
    components = 0.6:2:0.5, 0.4:-1:1     ; weight:mean:std

A Spot program lists weight:scale:offset triples::

    [spot]
    components = 0.6:0.5:2, 0.4:1:-1

An experiment section mirrors the command-line flags::

    [experiment]
    app = poiseuille
    method = monte-carlo
    params = 4, 256, 1152
    reps = 30
    seed = 2024
"""

from __future__ import annotations

import configparser
import math
from pathlib import Path

from .core_dist import Bernoulli, Exponential, Gaussian, GaussianMixture, LogNormal, ParametricDist, Uniform
from .errors import ConfigError
from .pprvg_sim import SpotProgram

_FAMILIES = {
    "uniform": (Uniform, ("lower", "upper")),
    "gaussian": (Gaussian, ("mu", "sigma")),
    "bernoulli": (Bernoulli, ("p",)),
    "lognormal": (LogNormal, ("mu", "sigma")),
    "exponential": (Exponential, ("rate",)),
}


def _float(section, key) -> float:
    try:
        v = float(section[key])
    except KeyError:
        raise ConfigError(f"[{section.name}] is missing {key!r}") from None
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {section[key]!r} is not a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"[{section.name}] {key} must be finite")
    return v


def _triples(section, key="components") -> tuple[tuple[float, float, float], ...]:
    raw = section.get(key)
    if raw is None:
        raise ConfigError(f"[{section.name}] is missing {key!r}")
    out = []
    for item in raw.replace("\n", ",").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 3:
            raise ConfigError(f"[{section.name}] component {item!r} must be a:b:c")
        try:
            out.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ConfigError(f"[{section.name}] component {item!r} is not numeric") from None
    return tuple(out)


def dist_from_section(section) -> ParametricDist:
    family = section.get("family", "").strip().lower()
    try:
        if family == "mixture":
            return GaussianMixture(_triples(section))
        if family not in _FAMILIES:
            raise ConfigError(f"[{section.name}] unknown family {family!r}")
        cls, keys = _FAMILIES[family]
        return cls(*(_float(section, k) for k in keys))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {exc}") from exc


def dist_to_section(dist: ParametricDist) -> dict[str, str]:
    if isinstance(dist, GaussianMixture):
        return {"family": "mixture", "components": ", ".join(f"{w!r}:{m!r}:{s!r}" for w, m, s in dist.components)}
    for family, (cls, keys) in _FAMILIES.items():
        if type(dist) is cls:
            return {"family": family, **{k: repr(float(getattr(dist, k))) for k in keys}}
    raise ConfigError(f"cannot serialise {type(dist).__name__}")


def spot_from_section(section) -> SpotProgram:
    try:
        return SpotProgram(_triples(section))
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {exc}") from exc


def parse(text: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    return cp


def load(path) -> configparser.ConfigParser:
    try:
        return parse(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def distributions(cp: configparser.ConfigParser) -> dict[str, ParametricDist]:
    return {
        name.split(":", 1)[1].strip(): dist_from_section(cp[name])
        for name in cp.sections()
        if name.startswith("distribution:")
    }


def dump_distributions(dists: dict[str, ParametricDist]) -> str:
    cp = configparser.ConfigParser()
    for name, d in dists.items():
        cp[f"distribution:{name}"] = dist_to_section(d)
    lines = []
    for sec in cp.sections():
        lines.append(f"[{sec}]")
        lines.extend(f"{k} = {v}" for k, v in cp[sec].items())
        lines.append("")
    return "\n".join(lines)


def experiment_options(cp: configparser.ConfigParser) -> dict:
    """The [experiment] section as keyword arguments for ExperimentConfig."""
    if not cp.has_section("experiment"):
        raise ConfigError("config has no [experiment] section")
    sec = cp["experiment"]
    opts: dict = {}
    for key in ("app", "method", "out", "w1_route"):
        if key in sec:
            opts[key] = sec[key].strip()
    try:
        if "params" in sec:
            opts["params"] = tuple(int(p) for p in sec["params"].replace("\n", ",").split(",") if p.strip())
        for key in ("reps", "seed", "gt_samples", "grappa_k"):
            if key in sec:
                opts[key] = int(sec[key])
        if "delay_s" in sec:
            opts["delay_s"] = float(sec["delay_s"])
    except ValueError as exc:
        raise ConfigError(f"[experiment] {exc}") from exc
    return opts
