"""Polarimeter simulation: spin-interference fringes, phase extraction, non-additivity.

The apparatus is modelled as ``U1^dagger U_phi(eta) U1`` acting on a beam
polarized along +z with purity ``r``, where ``U1`` is a pi/2 rotation about
+x and ``eta`` enters ``U_phi`` as a shift of its ``zeta`` angle. The
detector projects onto ``|up>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import NoRealization, OutOfDomain, PurityZero
from .fitting import fit_cosine
from .spin import (
    BlochVector,
    Su2Params,
    dagger,
    mixed_phase_general,
    mixed_phase_theory,
    rotation,
    su2_from_params,
)

U1 = rotation([1.0, 0.0, 0.0], math.pi / 2)
PROJ_UP = np.array([[1, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian jitter of the first coil's rotation angle."""

    kind: Literal["none", "angle_jitter"] = "none"
    sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "angle_jitter"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    @property
    def contrast(self) -> float:
        """Exact ensemble shrink factor ``<cos eps> = exp(-sigma^2/2)``."""
        if self.kind == "none":
            return 1.0
        return math.exp(-0.5 * self.sigma**2)


@dataclass(frozen=True)
class PolarimeterConfig:
    params: Su2Params
    purity: float
    eta_grid: np.ndarray = field(
        default_factory=lambda: np.linspace(0.0, 2 * math.pi, 32, endpoint=False)
    )
    # None selects analytic mode: exact expected counts, no Poisson draw
    counts_per_point: float | None = 1e4
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta_grid", np.asarray(self.eta_grid, dtype=float))
        if not 0.0 <= self.purity <= 1.0:
            raise ValueError(f"purity out of [0,1]: {self.purity!r}")
        if self.counts_per_point is not None and self.counts_per_point <= 0:
            raise ValueError("counts_per_point must be positive")
        problem = eta_grid_problem(self.eta_grid)
        if problem:
            raise ValueError(problem)


def eta_grid_problem(eta) -> str | None:
    """Describe why a scan grid is unfit for fringe fitting, or None."""
    eta = np.sort(np.asarray(eta, dtype=float))
    if len(eta) < 8:
        return f"eta_grid has {len(eta)} points; fringe fitting needs at least 8"
    coverage = (eta[-1] - eta[0]) + float(np.median(np.diff(eta)))
    if coverage < 2 * math.pi * (1 - 1e-9):
        return f"eta_grid covers {coverage:.4f} rad; a full 2*pi period is required"
    return None


@dataclass(frozen=True)
class FringeStats:
    """Fitted fringe extrema with the reference intensity.

    ``cov`` is the covariance of ``(i_max, i_min, i_zero)``; zero for
    noiseless data.
    """

    i_max: float
    i_min: float
    i_zero: float
    i_norm: float
    cov: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)), repr=False)

    def __post_init__(self):
        if self.i_min < 0 or self.i_min > self.i_max:
            raise ValueError(f"need 0 <= i_min <= i_max, got {self.i_min}, {self.i_max}")
        if self.i_norm <= 0:
            raise ValueError("i_norm must be positive")

    @classmethod
    def from_extrema(cls, i_max, i_min, i_zero, purity, cov=None) -> "FringeStats":
        cov = np.zeros((3, 3)) if cov is None else np.asarray(cov, dtype=float)
        return cls(float(i_max), float(i_min), float(i_zero),
                   2.0 * float(i_zero) / (1.0 + purity), cov)


def u_phi_shifted(p: Su2Params, eta: float) -> np.ndarray:
    """``U_phi`` with the coil shift ``eta`` applied (``zeta -> zeta - eta``)."""
    return su2_from_params(Su2Params(p.xi, p.delta, p.zeta - eta))


def pure_intensity(p: Su2Params, eta: float) -> float:
    return (math.cos(p.xi) ** 2 * math.cos(p.delta) ** 2
            + math.sin(p.xi) ** 2 * math.cos(p.zeta - eta) ** 2)


def mixed_intensity(purity: float, p: Su2Params, eta: float) -> float:
    if not 0.0 <= purity <= 1.0:
        raise ValueError(f"purity out of [0,1]: {purity!r}")
    return 0.5 * (1.0 - purity) + purity * pure_intensity(p, eta)


def intensity_pipeline(rho: BlochVector, u_phi) -> float:
    """Detector probability ``Tr[P_up W rho W^dagger]`` with ``W = U1^dagger U_phi U1``.

    Independent matrix route to :func:`mixed_intensity`.
    """
    w = dagger(U1) @ np.asarray(u_phi) @ U1
    return float(np.real(np.trace(PROJ_UP @ w @ rho.density_matrix() @ dagger(w))))


def extract_phase(stats: FringeStats, purity: float, clip: bool = False) -> float:
    """Mixed-state phase from fringe extrema and the reference intensity.

    Returns the unsigned phase in [0, pi/2]. With ``clip=True`` a radicand
    pushed outside [0, 1] by counting noise is projected onto the physical
    boundary instead of raising OutOfDomain; use it for noisy data only.
    """
    if purity < 1e-12:
        raise PurityZero("phase extraction needs a nonzero purity")
    lo = stats.i_min / stats.i_norm
    hi = stats.i_max / stats.i_norm
    num = (lo - 0.5 * (1.0 - purity)) / purity
    den = purity * (0.5 * (1.0 + purity) - hi) + num
    if den == 0.0 and not clip:
        raise OutOfDomain("fringe statistics give 0/0 in the phase formula")
    radicand = num / den if den != 0.0 else 1.0
    if not clip and not -1e-9 <= radicand <= 1.0 + 1e-9:
        raise OutOfDomain(
            f"radicand {radicand:.6g} outside [0, 1]; stats inconsistent with purity {purity}"
        )
    return math.acos(math.sqrt(min(max(radicand, 0.0), 1.0)))


def phase_uncertainty(stats: FringeStats, purity: float, clip: bool = False) -> float:
    """Standard error of :func:`extract_phase` propagated from ``stats.cov``.

    ``clip`` is passed on to :func:`extract_phase`; at a clipped estimate
    the propagated error is only a rough guide.
    """
    x0 = np.array([stats.i_max, stats.i_min, stats.i_zero])

    def phase_at(x):
        return extract_phase(FringeStats.from_extrema(*x, purity), purity, clip)

    grad = np.zeros(3)
    for k in range(3):
        h = 1e-6 * max(abs(x0[k]), 1.0)
        up, dn = x0.copy(), x0.copy()
        up[k] += h
        dn[k] -= h
        grad[k] = (phase_at(up) - phase_at(dn)) / (2 * h)
    return math.sqrt(max(float(grad @ stats.cov @ grad), 0.0))


def analytic_stats(purity: float, p: Su2Params, scale: float = 1.0) -> FringeStats:
    """Closed-form fringe extrema for an ideal scan over a full period."""
    base = math.cos(p.xi) ** 2 * math.cos(p.delta) ** 2
    lo = 0.5 * (1.0 - purity) + purity * base
    hi = lo + purity * math.sin(p.xi) ** 2
    i_zero = 0.5 * (1.0 + purity)
    return FringeStats.from_extrema(scale * hi, scale * lo, scale * i_zero, purity)


def simulate_fringe_scan(cfg: PolarimeterConfig, noise: NoiseModel | None = None):
    """Simulate an eta scan plus a ``U_phi = 1`` reference run.

    The fringe goes as ``cos^2(zeta - eta)``, so it is fitted as the second
    harmonic of eta. Counts are Poisson with mean ``counts_per_point * I(eta)``; in analytic
    mode (``counts_per_point is None``) the expected intensities are used
    directly. Coil jitter reduces the effective purity by ``noise.contrast``.

    Returns ``(samples, stats)`` with ``samples`` an ``(n, 2)`` array of
    ``(eta, counts)`` rows.
    """
    noise = noise or NoiseModel()
    purity = cfg.purity * noise.contrast
    analytic = cfg.counts_per_point is None
    scale = 1.0 if analytic else float(cfg.counts_per_point)

    eta = cfg.eta_grid
    mean = scale * np.array([mixed_intensity(purity, cfg.params, e) for e in eta])
    # U_phi = 1 gives a flat fringe at (1 + r)/2
    mean0 = np.full_like(eta, scale * 0.5 * (1.0 + purity))
    if analytic:
        counts, counts0 = mean, mean0
        fit = fit_cosine(eta, counts, harmonic=2)
        var0 = 0.0
    else:
        rng = np.random.default_rng(cfg.rng_seed)
        counts = rng.poisson(mean).astype(float)
        counts0 = rng.poisson(mean0).astype(float)
        fit = fit_cosine(eta, counts, variance=counts, harmonic=2)
        var0 = float(np.sum(counts0)) / len(counts0) ** 2

    i_zero = float(np.mean(counts0))
    # i_max = a + b, i_min = a - b
    t = np.array([[1.0, 1.0], [1.0, -1.0]])
    cov = np.zeros((3, 3))
    cov[:2, :2] = t @ fit.cov[:2, :2] @ t.T
    cov[2, 2] = var0
    stats = FringeStats.from_extrema(fit.maximum, max(fit.minimum, 0.0), i_zero, purity, cov)
    return np.column_stack([eta, counts]), stats


def effective_purity(cfg: PolarimeterConfig, noise: NoiseModel | None = None) -> float:
    return cfg.purity * (noise or NoiseModel()).contrast


def depolarize(initial: BlochVector, noise: NoiseModel, nsamples: int) -> BlochVector:
    """Ensemble-average a pi/2 rotation about +x whose angle jitters by ``eps``.

    ``eps`` is Gaussian with standard deviation ``noise.sigma``. The
    average is taken over rotated Bloch vectors, which is the same as
    averaging density matrices because the map is linear.
    """
    if noise.kind != "angle_jitter":
        raise ValueError("depolarize needs an angle_jitter noise model")
    if nsamples < 1:
        raise ValueError("nsamples must be positive")
    r = initial.vector
    if noise.sigma == 0.0:
        angles = np.array([math.pi / 2])
    else:
        rng = np.random.default_rng(noise.rng_seed)
        angles = math.pi / 2 + rng.normal(0.0, noise.sigma, nsamples)
    c, s = np.cos(angles), np.sin(angles)
    # rotation about x: (x, y, z) -> (x, y c - z s, y s + z c)
    mean = np.array([
        r[0],
        float(np.mean(r[1] * c - r[2] * s)),
        float(np.mean(r[1] * s + r[2] * c)),
    ])
    if noise.sigma == 0.0:
        mean = np.round(mean, 15) + 0.0
    return BlochVector(*mean)


@dataclass(frozen=True)
class NonAdditivity:
    Phi_g: float
    Phi_d: float
    Phi_tot: float
    sum: float
    realizations: dict = field(repr=False)
    oracle: dict = field(repr=False)

    @property
    def gap(self) -> float:
        return self.Phi_tot - self.sum


def realize_phases(phi_g: float, phi_d: float) -> Su2Params:
    """SU(2) angles whose pure-state phases are ``phi_g`` (geometric) and ``phi_d``.

    Solves ``delta (1 - cos 2xi) = phi_g`` and ``delta cos 2xi = phi_d``.
    """
    delta = phi_g + phi_d
    if not -math.pi < delta <= math.pi:
        raise NoRealization(f"phi_g + phi_d = {delta:.6g} outside (-pi, pi]")
    if delta == 0.0:
        if phi_g != 0.0:
            raise NoRealization("phi_g = -phi_d != 0 cannot be realized")
        return Su2Params(0.0, 0.0, 0.0)
    c2 = phi_d / delta
    if not -1.0 <= c2 <= 1.0:
        raise NoRealization(f"cos(2 xi) = {c2:.6g} is not a cosine")
    return Su2Params(0.5 * math.acos(c2), delta, 0.0)


def non_additivity_report(phi_g: float, phi_d: float, purity: float) -> NonAdditivity:
    """Mixed-state phases of separate geometric/dynamical runs vs the combined run.

    Each phase is also recomputed from ``arg Tr(rho U)`` for a concrete
    unitary realizing it; a disagreement beyond 1e-9 raises RuntimeError.
    """
    if not 0.0 < purity <= 1.0:
        raise ValueError(f"purity must lie in (0, 1], got {purity!r}")
    for name, val in (("phi_g", phi_g), ("phi_d", phi_d)):
        if not -math.pi < val <= math.pi:
            raise NoRealization(f"{name} = {val:.6g} outside (-pi, pi]")
    realizations = {
        "geometric": Su2Params(math.pi / 4, phi_g, 0.0),
        "dynamical": Su2Params(0.0, phi_d, 0.0),
        "total": realize_phases(phi_g, phi_d),
    }
    theory = {
        "geometric": mixed_phase_theory(purity, phi_g),
        "dynamical": mixed_phase_theory(purity, phi_d),
        "total": mixed_phase_theory(purity, phi_g + phi_d),
    }
    rho = BlochVector.along_z(purity)
    oracle = {k: mixed_phase_general(rho, su2_from_params(p))[0]
              for k, p in realizations.items()}
    for k in theory:
        if abs(theory[k] - oracle[k]) > 1e-9:
            raise RuntimeError(f"{k} phase: closed form {theory[k]} vs trace {oracle[k]}")
    return NonAdditivity(
        Phi_g=theory["geometric"],
        Phi_d=theory["dynamical"],
        Phi_tot=theory["total"],
        sum=theory["geometric"] + theory["dynamical"],
        realizations=realizations,
        oracle=oracle,
    )

