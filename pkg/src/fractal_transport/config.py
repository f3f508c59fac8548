"""Experiment configuration: defaults, YAML loading, dotted overrides and validation."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import yaml

from .errors import ConfigError
from .lattice import (
    MAX_CARPET_GENERATION,
    MAX_GASKET_GENERATION,
    LatticeKind,
)

OBSERVABLES = (
    "msd",
    "return_probability",
    "region_weight",
    "classical_msd",
    "classical_return",
    "spectrum",
    "staircase",
    "lattice",
    "operator",
)
WINDOW_NAMES = ("short", "intermediate", "long", "spreading")
INITIAL_TYPES = ("site", "superposition", "ensemble")

DEFAULTS = {
    "name": "experiment",
    "lattice": {"kind": "gasket", "generation": 4, "side": None, "gamma": 1.0, "J": 1.0},
    "initial": {
        "type": "site",
        "site": "corner",
        "corner": "lower-left",
        "sign": "+",
        "region": None,
        "sample": None,
    },
    "times": {"start": 0.01, "stop": 1.0e4, "points": 400},
    "observables": ["msd"],
    "analysis": {"windows": ["intermediate"], "regions": [], "fraction": 0.5},
    "sweep": {"gamma": []},
    "output": {"dir": "output"},
    "seed": 0,
}


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    generation: int | None
    side: int | None
    gamma: float
    J: float


@dataclass(frozen=True)
class InitialSpec:
    type: str
    site: int | str
    corner: str
    sign: str
    region: int | None
    sample: int | None


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    points: int


@dataclass(frozen=True)
class AnalysisSpec:
    windows: tuple
    regions: tuple
    fraction: float


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    lattice: LatticeSpec
    initial: InitialSpec
    times: TimeGrid
    observables: tuple
    analysis: AnalysisSpec
    sweep_gamma: tuple
    output_dir: str
    seed: int

    def to_dict(self):
        d = asdict(self)
        d["observables"] = list(self.observables)
        d["analysis"]["windows"] = [list(w) if isinstance(w, tuple) else w
                                    for w in self.analysis.windows]
        d["analysis"]["regions"] = list(self.analysis.regions)
        d["sweep"] = {"gamma": list(d.pop("sweep_gamma"))}
        d["output"] = {"dir": d.pop("output_dir")}
        return d

    def digest(self):
        """SHA-256 of the canonical JSON form, excluding the output directory."""
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def deep_merge(base, update):
    out = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_value(text):
    """Interpret a command-line override value (YAML scalar or flow collection)."""
    if text in ("+", "-"):
        return text
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError:
        return text
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def apply_override(data, dotted, value):
    keys = dotted.split(".")
    node = data
    for depth, key in enumerate(keys[:-1]):
        if key not in node or not isinstance(node[key], dict):
            raise ConfigError(".".join(keys[: depth + 1]), "unknown section")
        node = node[key]
    if keys[-1] not in node:
        raise ConfigError(dotted, "unknown key")
    node[keys[-1]] = value
    return data


def load_config_file(path):
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(str(path), "config must be a mapping")
    return data


def _check_unknown(data, defaults, prefix=""):
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigError(path, "unknown key")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(path, "expected a mapping")
            _check_unknown(value, defaults[key], path + ".")


def _int(path, value, lo=None, hi=None, allow_none=False):
    if value is None and allow_none:
        return None
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(path, f"{value} outside [{lo}, {hi}]")
    return value


def _float(path, value, lo=None, hi=None, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if positive and not value > 0:
        raise ConfigError(path, "must be positive")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(path, f"{value} outside [{lo}, {hi}]")
    return value


def resolve(data=None, overrides=None):
    """Merge ``data`` and dotted ``overrides`` over the defaults and validate.

    ``overrides`` is an iterable of ``(dotted_key, value)`` pairs.
    """
    data = data or {}
    _check_unknown(data, DEFAULTS)
    merged = deep_merge(DEFAULTS, data)
    for key, value in overrides or ():
        apply_override(merged, key, value)
    return validate(merged)


def validate(d):
    lat = d["lattice"]
    try:
        kind = LatticeKind(lat["kind"]).value
    except ValueError:
        raise ConfigError("lattice.kind", f"unknown lattice kind {lat['kind']!r}") from None
    gen = side = None
    if kind in ("gasket", "interpolating"):
        gen = _int("lattice.generation", lat["generation"], 1, MAX_GASKET_GENERATION)
    elif kind == "carpet":
        gen = _int("lattice.generation", lat["generation"], 1, MAX_CARPET_GENERATION)
    else:
        side = _int("lattice.side", lat["side"], 2)
    lattice = LatticeSpec(kind, gen, side, _float("lattice.gamma", lat["gamma"], 0.0, 1.0),
                          _float("lattice.J", lat["J"], positive=True))

    ini = d["initial"]
    if ini["type"] not in INITIAL_TYPES:
        raise ConfigError("initial.type", f"expected one of {INITIAL_TYPES}")
    site = ini["site"]
    if site != "corner":
        site = _int("initial.site", site, 0)
    sign = {1: "+", -1: "-", "+": "+", "-": "-", "+1": "+", "-1": "-"}.get(ini["sign"])
    if sign is None:
        raise ConfigError("initial.sign", "expected '+' or '-'")
    region = _int("initial.region", ini["region"], 0, allow_none=True)
    sample = _int("initial.sample", ini["sample"], 2, allow_none=True)
    if ini["type"] == "ensemble" and (region is None) == (sample is None):
        raise ConfigError("initial", "ensemble needs exactly one of 'region' or 'sample'")
    initial = InitialSpec(ini["type"], site, str(ini["corner"]), sign, region, sample)

    t = d["times"]
    times = TimeGrid(_float("times.start", t["start"], positive=True),
                     _float("times.stop", t["stop"], positive=True),
                     _int("times.points", t["points"], 2))
    if times.stop <= times.start:
        raise ConfigError("times.stop", "must exceed times.start")

    obs = d["observables"]
    if obs is None:
        obs = []
    if not isinstance(obs, list):
        raise ConfigError("observables", "expected a list")
    for k, name in enumerate(obs):
        if name not in OBSERVABLES:
            raise ConfigError(f"observables[{k}]", f"unknown observable {name!r}")

    an = d["analysis"]
    windows = []
    for k, w in enumerate(an["windows"] or []):
        if isinstance(w, str):
            if w not in WINDOW_NAMES:
                raise ConfigError(f"analysis.windows[{k}]", f"unknown window {w!r}")
            windows.append(w)
        elif isinstance(w, (list, tuple)) and len(w) == 2:
            lo = _float(f"analysis.windows[{k}][0]", w[0], positive=True)
            hi = _float(f"analysis.windows[{k}][1]", w[1], positive=True)
            if hi <= lo:
                raise ConfigError(f"analysis.windows[{k}]", "upper edge must exceed lower edge")
            windows.append((lo, hi))
        else:
            raise ConfigError(f"analysis.windows[{k}]", "expected a window name or [lo, hi]")
    regions = tuple(_int(f"analysis.regions[{k}]", r, 0) for k, r in enumerate(an["regions"] or []))
    if "region_weight" in obs and not regions:
        raise ConfigError("analysis.regions", "region_weight needs at least one region")
    analysis = AnalysisSpec(tuple(windows), regions,
                            _float("analysis.fraction", an["fraction"], 0.0, 1.0, positive=True))

    gammas = d["sweep"]["gamma"] or []
    if not isinstance(gammas, list):
        raise ConfigError("sweep.gamma", "expected a list")
    gammas = tuple(_float(f"sweep.gamma[{k}]", g, 0.0, 1.0) for k, g in enumerate(gammas))
    if gammas and kind != "interpolating":
        raise ConfigError("sweep.gamma", "a gamma sweep needs lattice.kind = interpolating")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ConfigError("sweep.gamma", "values must be strictly increasing")

    name = d["name"]
    if not isinstance(name, str) or not name or "/" in name:
        raise ConfigError("name", "expected a non-empty file-name-safe string")
    return ExperimentConfig(
        name=name,
        lattice=lattice,
        initial=initial,
        times=times,
        observables=tuple(obs),
        analysis=analysis,
        sweep_gamma=gammas,
        output_dir=str(d["output"]["dir"]),
        seed=_int("seed", d["seed"]),
    )
