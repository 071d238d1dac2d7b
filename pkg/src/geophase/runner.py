"""Scenario dispatch and tabular output.

Every scenario turns an :class:`ExperimentConfig` into a
:class:`ResultTable`. Tables are written as comma-separated text behind a
``#`` header that echoes the config, the seed and the package version.
Floats are written with ``repr`` so a rerun with the same config and seed
reproduces the file byte for byte.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bell import (
    azimuthal_adjust,
    numerical_polar_max,
    polar_adjust,
    s_standard,
    simulate_s,
    uncorrected,
)
from .config import SCHEMA_VERSION, ExperimentConfig
from .errors import ConfigInvalid, IoFailure
from .interferometry import InterferometerScan, phase_slope
from .polarimetry import (
    NoiseModel,
    PolarimeterConfig,
    effective_purity,
    extract_phase,
    non_additivity_report,
    phase_uncertainty,
    simulate_fringe_scan,
)
from .spin import Su2Params, mixed_phase_theory


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(f"row {i} has {len(row)} values for {len(self.columns)} columns")

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([row[j] for row in self.rows], dtype=float)

    def to_text(self) -> str:
        out = io.StringIO()
        for key in sorted(self.metadata):
            val = self.metadata[key]
            text = val if isinstance(val, str) else json.dumps(val, sort_keys=True, default=str)
            out.write(f"# {key}: {text}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
        return out.getvalue()

    def write(self, path) -> None:
        try:
            path = Path(path)
            if path.parent != Path(""):
                path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_text(), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _row_seed(seed: int, *index: int) -> int:
    """Independent per-row seed derived from the run seed."""
    return int(np.random.SeedSequence([seed, *index]).generate_state(1)[0])


def _polarimeter_phase(cfg: ExperimentConfig) -> ResultTable:
    p = cfg.params
    eta = p["eta_grid"]
    if eta is None:
        eta = np.linspace(0.0, 2 * math.pi, p["eta_points"], endpoint=False)
    counts = None if cfg.analytic_mode else p["counts_per_point"]
    rows = []
    for i, r in enumerate(p["purity"]):
        for j, delta in enumerate(p["delta"]):
            params = Su2Params(p["xi"], float(delta), p["zeta"])
            theory = abs(mixed_phase_theory(float(r), float(delta)))
            for k in range(p["repeats"]):
                seed = _row_seed(cfg.seed, i, j, k)
                noise = (NoiseModel("angle_jitter", p["noise_sigma"], seed)
                         if p["noise_sigma"] > 0 else NoiseModel())
                pc = PolarimeterConfig(params, float(r), eta, counts, seed)
                _, stats = simulate_fringe_scan(pc, noise)
                r_eff = effective_purity(pc, noise)
                phi = extract_phase(stats, r_eff, clip=counts is not None)
                sigma = phase_uncertainty(stats, r_eff, clip=True) if counts is not None else 0.0
                rows.append((float(r), float(delta), k, phi, sigma, theory))
    return ResultTable(("r", "delta", "repeat", "Phi", "Phi_sigma", "Phi_theory"), rows)


def _non_additivity(cfg: ExperimentConfig) -> ResultTable:
    p = cfg.params
    rows = []
    for r in p["purity"]:
        rep = non_additivity_report(p["phi_g"], p["phi_d"], float(r))
        rows.append((float(r), rep.Phi_g, rep.Phi_d, rep.Phi_tot, rep.sum, rep.gap))
    return ResultTable(("r", "Phi_g", "Phi_d", "Phi_tot", "sum", "gap"), rows)


def _interferogram(cfg: ExperimentConfig) -> ResultTable:
    p = cfg.params
    chi = np.linspace(0.0, 2 * math.pi, p["chi_points"], endpoint=False)
    scan = InterferometerScan(chi, 0.0, p["phi_II"], p["initial_polarization"])
    counts = None if cfg.analytic_mode else p["counts"]
    rng = np.random.default_rng(cfg.seed)
    fit = phase_slope(p["phi_I"], scan, counts, rng)
    rows = [(float(phi), float(ph), fit.slope) for phi, ph in zip(p["phi_I"], fit.phases)]
    return ResultTable(("phi_I", "fringe_phase", "slope_fit"), rows)


def _measured_s(cfg: ExperimentConfig, result, gamma: float, index: int, slot: int = 0) -> float:
    if cfg.analytic_mode:
        return result.s_value
    return simulate_s(result.angles, gamma, cfg.params["counts_per_setting"],
                      seed=_row_seed(cfg.seed, index, slot))


def _chsh_polar(cfg: ExperimentConfig) -> ResultTable:
    adjust = numerical_polar_max if cfg.params["method"] == "numerical" else polar_adjust
    rows = []
    for i, g in enumerate(cfg.params["gamma"]):
        g = float(g)
        res = adjust(g)
        rows.append((g, _measured_s(cfg, res, g, i), res.angles.beta.polar,
                     res.angles.beta_p.polar))
    return ResultTable(("gamma", "S", "beta1", "beta1p"), rows)


def _chsh_azimuthal(cfg: ExperimentConfig) -> ResultTable:
    rows = []
    for i, g in enumerate(cfg.params["gamma"]):
        g = float(g)
        res = azimuthal_adjust(g)
        if cfg.analytic_mode:
            s_unc = s_standard(g)
        else:
            s_unc = _measured_s(cfg, uncorrected(g), g, i, 1)
        rows.append((g, _measured_s(cfg, res, g, i), res.angles.alpha_p.azimuthal, s_unc))
    return ResultTable(("gamma", "S", "alpha2p", "S_uncorrected"), rows)


SCENARIO_RUNNERS = {
    "polarimeter_phase": _polarimeter_phase,
    "non_additivity": _non_additivity,
    "interferogram": _interferogram,
    "chsh_polar": _chsh_polar,
    "chsh_azimuthal": _chsh_azimuthal,
}


def execute(cfg: ExperimentConfig) -> ResultTable:
    """Run the scenario and attach metadata without writing anything."""
    table = SCENARIO_RUNNERS[cfg.scenario](cfg)
    table.metadata = {
        "config": cfg.raw,
        "scenario": cfg.scenario,
        "schema_version": str(SCHEMA_VERSION),
        "seed": str(cfg.seed),
        "version": f"geophase {__version__}",
    }
    return table


def run(cfg: ExperimentConfig) -> ResultTable:
    """Run the scenario, write the table to ``cfg.output_path`` if set, return it."""
    table = execute(cfg)
    if cfg.output_path is not None:
        table.write(cfg.output_path)
    return table


def sweep(cfg: ExperimentConfig, param: str, values: list) -> ResultTable:
    """Rerun the scenario with ``param`` set to each value in turn.

    Rows of all runs are concatenated under an extra leading column named
    after the parameter (``<param>_sweep`` if the scenario already has that
    column). A swept grid parameter must be a single value per run.
    """
    tables = []
    for v in values:
        if isinstance(v, (list, dict)):
            raise ConfigInvalid(f"--values: {param} must take one value per run, got {v!r}")
        sub = _without_output(cfg.with_overrides(params={param: v}))
        tables.append((sub.params[param], execute(sub)))
    first = tables[0][1]
    rows = []
    for val, t in tables:
        key = val if isinstance(val, str) else float(np.atleast_1d(val)[0])
        rows.extend((key, *row) for row in t.rows)
    name = param if param not in first.columns else f"{param}_sweep"
    table = ResultTable((name, *first.columns), rows, dict(first.metadata))
    table.metadata["config"] = cfg.raw
    table.metadata["sweep"] = {"param": param, "values": list(values)}
    if cfg.output_path is not None:
        table.write(cfg.output_path)
    return table


def _without_output(cfg: ExperimentConfig) -> ExperimentConfig:
    raw = dict(cfg.raw)
    raw.pop("output_path", None)
    return ExperimentConfig.from_mapping(raw)
