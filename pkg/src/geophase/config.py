"""Experiment configuration: strict YAML schema with key-path diagnostics.

A config file looks like::

    schema_version: 1
    scenario: chsh_polar
    seed: 7
    output_path: results/polar.csv
    analytic_mode: true
    chsh_polar:
      gamma: {start: 0, stop: 180 deg, num: 33}

Angles are radians. A string with a ``deg`` suffix (``"45 deg"``) is read
as degrees, and ``pi`` multiples (``"pi/4"``, ``"3*pi/4"``) are accepted as
radians. A grid is either a list of values or ``{start, stop, num}`` with
both ends included.
"""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import yaml

from .errors import ConfigInvalid, IoFailure
from .polarimetry import eta_grid_problem

SCHEMA_VERSION = 1

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_DEG = re.compile(rf"^\s*({_NUM})\s*deg\s*$")
_PI = re.compile(rf"^\s*([+-]?)\s*(?:({_NUM})\s*\*?\s*)?pi\s*(?:/\s*({_NUM}))?\s*$")


class _Bad(Exception):
    pass


def parse_angle(value) -> float:
    """Radians from a number, ``"<x> deg"`` or ``"[k*]pi[/n]"``."""
    if isinstance(value, bool):
        raise _Bad(f"expected an angle, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _DEG.match(value)
        if m:
            return math.radians(float(m.group(1)))
        m = _PI.match(value)
        if m:
            sign = -1.0 if m.group(1) == "-" else 1.0
            k = float(m.group(2)) if m.group(2) else 1.0
            n = float(m.group(3)) if m.group(3) else 1.0
            if n == 0:
                raise _Bad(f"division by zero in angle {value!r}")
            return sign * k * math.pi / n
    raise _Bad(f"expected an angle in rad (number, 'x deg' or 'k*pi/n'), got {value!r}")


def _real(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _Bad(f"expected a number, got {value!r}")
    return float(value)


def _integer(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _Bad(f"expected an integer, got {value!r}")
    return value


def _grid(scalar: Callable) -> Callable:
    def parse(value) -> np.ndarray:
        if isinstance(value, dict):
            extra = set(value) - {"start", "stop", "num"}
            if extra:
                raise _Bad(f"unknown grid keys {sorted(extra)}")
            missing = {"start", "stop", "num"} - set(value)
            if missing:
                raise _Bad(f"grid needs {sorted(missing)}")
            num = _integer(value["num"])
            if num < 1:
                raise _Bad("grid num must be at least 1")
            return np.linspace(scalar(value["start"]), scalar(value["stop"]), num)
        if isinstance(value, list):
            if not value:
                raise _Bad("grid list is empty")
            return np.array([scalar(v) for v in value], dtype=float)
        return np.array([scalar(value)], dtype=float)

    return parse


angle_grid = _grid(parse_angle)
real_grid = _grid(_real)


def _choice(*options):
    def parse(value):
        if value not in options:
            raise _Bad(f"expected one of {list(options)}, got {value!r}")
        return value

    return parse


def _in_unit(name):
    def check(v):
        arr = np.atleast_1d(v)
        if np.any((arr < 0.0) | (arr > 1.0)):
            return f"{name} out of [0,1]"
        return None

    return check


def _positive(v):
    return None if np.all(np.atleast_1d(v) > 0) else "must be positive"


def _non_negative(v):
    return None if np.all(np.atleast_1d(v) >= 0) else "must be non-negative"


@dataclass(frozen=True)
class Param:
    parse: Callable
    default: Any = None
    check: Callable | None = None
    required: bool = False


_GAMMA_DEFAULT = {"start": 0.0, "stop": math.pi, "num": 33}

SCENARIOS: dict[str, dict[str, Param]] = {
    "polarimeter_phase": {
        "purity": Param(real_grid, [0.1, 0.25, 0.5, 0.75, 1.0], _in_unit("purity")),
        "delta": Param(angle_grid, [0.2, 0.7, 1.2]),
        "xi": Param(parse_angle, math.pi / 4),
        "zeta": Param(parse_angle, 0.0),
        "eta_points": Param(_integer, 32),
        "eta_grid": Param(angle_grid, None),
        "counts_per_point": Param(_real, 1e4, _positive),
        "noise_sigma": Param(_real, 0.0, _non_negative),
        "repeats": Param(_integer, 1, _positive),
    },
    "non_additivity": {
        "purity": Param(real_grid, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
                        _in_unit("purity")),
        "phi_g": Param(parse_angle, math.pi / 4),
        "phi_d": Param(parse_angle, math.pi / 4),
    },
    "interferogram": {
        "phi_I": Param(angle_grid, {"start": 0.0, "stop": 2 * math.pi, "num": 13}),
        "phi_II": Param(parse_angle, 0.0),
        "initial_polarization": Param(_choice("up", "down"), "up"),
        "chi_points": Param(_integer, 24),
        "counts": Param(_real, 1e4, _positive),
    },
    "chsh_polar": {
        "gamma": Param(angle_grid, _GAMMA_DEFAULT),
        "method": Param(_choice("numerical", "closed_form"), "numerical"),
        "counts_per_setting": Param(_integer, 10_000, _positive),
    },
    "chsh_azimuthal": {
        "gamma": Param(angle_grid, _GAMMA_DEFAULT),
        "counts_per_setting": Param(_integer, 10_000, _positive),
    },
}

TOP_LEVEL = {"schema_version", "scenario", "seed", "output_path", "analytic_mode", *SCENARIOS}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    params: dict
    seed: int = 0
    output_path: str | None = None
    analytic_mode: bool = False
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_mapping(cls, raw) -> "ExperimentConfig":
        diags, parsed = _check(raw)
        if diags:
            raise ConfigInvalid(diags)
        return parsed

    def with_overrides(self, *, seed=None, output_path=None, analytic_mode=None,
                       params: dict | None = None) -> "ExperimentConfig":
        """New config with top-level fields or scenario parameters replaced."""
        raw = copy.deepcopy(self.raw)
        if seed is not None:
            raw["seed"] = seed
        if output_path is not None:
            raw["output_path"] = output_path
        if analytic_mode is not None:
            raw["analytic_mode"] = analytic_mode
        for key, val in (params or {}).items():
            raw.setdefault(self.scenario, {})
            if raw[self.scenario] is None:
                raw[self.scenario] = {}
            raw[self.scenario][key] = val
        return ExperimentConfig.from_mapping(raw)


def _check(raw) -> tuple[list[str], ExperimentConfig | None]:
    diags: list[str] = []
    if not isinstance(raw, dict):
        return [f"<root>: expected a mapping, got {type(raw).__name__}"], None

    for key in sorted(set(raw) - TOP_LEVEL, key=str):
        diags.append(f"{key}: unknown key")

    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        diags.append(f"schema_version: unsupported version {version!r} (expected {SCHEMA_VERSION})")

    scenario = raw.get("scenario")
    if scenario is None:
        diags.append("scenario: missing required key")
    elif scenario not in SCENARIOS:
        diags.append(f"scenario: unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
        scenario = None

    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        diags.append(f"seed: expected a non-negative integer, got {seed!r}")
    output_path = raw.get("output_path")
    if output_path is not None and not isinstance(output_path, str):
        diags.append(f"output_path: expected a string, got {output_path!r}")
    analytic = raw.get("analytic_mode", False)
    if not isinstance(analytic, bool):
        diags.append(f"analytic_mode: expected true or false, got {analytic!r}")

    for name in SCENARIOS:
        if name in raw and name != scenario and scenario is not None:
            diags.append(f"{name}: parameter block does not match scenario {scenario!r}")

    params = {}
    if scenario is not None:
        block = raw.get(scenario) or {}
        if not isinstance(block, dict):
            diags.append(f"{scenario}: expected a mapping")
            block = {}
        schema = SCENARIOS[scenario]
        for key in sorted(set(block) - set(schema), key=str):
            diags.append(f"{scenario}.{key}: unknown key")
        for key, rule in schema.items():
            path = f"{scenario}.{key}"
            if key not in block:
                if rule.required:
                    diags.append(f"{path}: missing required key")
                    continue
                value = rule.default
                if value is None:
                    params[key] = None
                    continue
            else:
                value = block[key]
            try:
                parsed = rule.parse(value)
            except _Bad as exc:
                diags.append(f"{path}: {exc}")
                continue
            if rule.check is not None:
                msg = rule.check(parsed)
                if msg:
                    diags.append(f"{path}: {msg}")
                    continue
            params[key] = parsed
        diags.extend(_cross_checks(scenario, params, bool(analytic)))

    if diags:
        return diags, None
    return [], ExperimentConfig(scenario, params, int(seed), output_path, bool(analytic),
                                copy.deepcopy(raw))


def _cross_checks(scenario: str, params: dict, analytic: bool) -> list[str]:
    out = []
    if scenario == "polarimeter_phase":
        if params.get("eta_grid") is not None:
            problem = eta_grid_problem(params["eta_grid"])
            if problem:
                out.append(f"polarimeter_phase.eta_grid: {problem}")
        elif "eta_points" in params and params["eta_points"] < 8:
            out.append(f"polarimeter_phase.eta_points: {params['eta_points']} points; "
                       "fringe fitting needs at least 8")
    if scenario == "interferogram" and params.get("chi_points", 24) < 3:
        out.append("interferogram.chi_points: fringe fitting needs at least 3 points")
    if scenario in ("non_additivity", "polarimeter_phase") and "purity" in params:
        if np.any(params["purity"] == 0.0):
            out.append(f"{scenario}.purity: the mixed-state phase is undefined at purity 0")
    return out


def validate(config) -> list[str]:
    """Diagnostics for a config mapping (or ExperimentConfig); empty when valid."""
    raw = config.raw if isinstance(config, ExperimentConfig) else config
    return _check(raw)[0]


def load(path) -> dict:
    """Read a YAML config file into a mapping without validating it."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigInvalid([f"<file>: not valid YAML: {exc}"]) from exc
    return {} if raw is None else raw


def load_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_mapping(load(path))
