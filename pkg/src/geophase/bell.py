"""CHSH analysis of the spin-path entangled state under a geometric phase.

The state is ``(|I,up> + e^{i gamma}|II,down>)/sqrt 2``. Path and spin
projectors are built from Bloch kets with polar angle ``a1`` and azimuth
``a2``::

    |+a> = cos(a1/2)|0> + e^{i a2} sin(a1/2)|1>
    |-a> = -sin(a1/2)|0> + e^{i a2} cos(a1/2)|1>

For this state the joint correlation is

    E(a, b) = cos a1 cos b1 + cos(a2 + b2 - gamma) sin a1 sin b1

so ``gamma`` acts as an azimuthal offset, and at the usual Bell angles
``S(gamma) = |sqrt2 + sqrt2 cos gamma|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy.optimize import minimize

from .errors import EmptyCounts, OptimizerStall
from .interferometry import SpinPathState, build_entangled_state
from .spin import wrap_angle

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
CLASSICAL_BOUND = 2.0


@dataclass(frozen=True)
class ProjectorAngles:
    polar: float
    azimuthal: float = 0.0

    def normalized(self) -> "ProjectorAngles":
        """Equivalent angles with polar in [0, pi] and azimuth in (-pi, pi].

        Reflecting the polar angle through a pole shifts the azimuth by pi;
        the projectors are unchanged.
        """
        theta = self.polar % (2 * math.pi)
        phi = self.azimuthal
        if theta > math.pi:
            theta = 2 * math.pi - theta
            phi += math.pi
        return ProjectorAngles(theta, wrap_angle(phi))

    def flipped(self) -> "ProjectorAngles":
        """The orthogonal direction: polar angle shifted by pi."""
        return ProjectorAngles(self.polar + math.pi, self.azimuthal)

    @property
    def is_block(self) -> bool:
        """Polar 0 or pi: realized on the path side by a beam block."""
        t = self.normalized().polar
        return t < 1e-12 or abs(t - math.pi) < 1e-12


@dataclass(frozen=True)
class BellSetting:
    alpha: ProjectorAngles
    alpha_p: ProjectorAngles
    beta: ProjectorAngles
    beta_p: ProjectorAngles

    @classmethod
    def standard(cls) -> "BellSetting":
        return cls(ProjectorAngles(0.0), ProjectorAngles(math.pi / 2),
                   ProjectorAngles(math.pi / 4), ProjectorAngles(3 * math.pi / 4))

    def pairs(self):
        """The four ``(path, spin)`` settings in CHSH order with their signs."""
        return [(self.alpha, self.beta, 1), (self.alpha, self.beta_p, -1),
                (self.alpha_p, self.beta, 1), (self.alpha_p, self.beta_p, 1)]


@dataclass(frozen=True)
class CountRates:
    n_pp: float
    n_pm: float
    n_mp: float
    n_mm: float

    def __post_init__(self):
        if min(self.n_pp, self.n_pm, self.n_mp, self.n_mm) < 0:
            raise ValueError("count rates must be non-negative")

    @property
    def total(self) -> float:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm


@dataclass(frozen=True)
class AdjustmentResult:
    angles: BellSetting
    s_value: float
    scheme: Literal["polar", "azimuthal", "none"]

    def __post_init__(self):
        if not 0.0 <= self.s_value <= TSIRELSON + 1e-9:
            raise ValueError(f"S = {self.s_value} outside [0, 2 sqrt 2]")

    @property
    def block_type(self) -> dict:
        """Which path settings are beam-block measurements."""
        return {"alpha": self.angles.alpha.is_block, "alpha_p": self.angles.alpha_p.is_block}


def bloch_ket(a: ProjectorAngles, sign: int) -> np.ndarray:
    c, s = math.cos(a.polar / 2), math.sin(a.polar / 2)
    phase = np.exp(1j * a.azimuthal)
    if sign > 0:
        return np.array([c, phase * s], dtype=complex)
    return np.array([-s, phase * c], dtype=complex)


def _projector(a: ProjectorAngles, sign: int) -> np.ndarray:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = bloch_ket(a, sign)
    return np.outer(k, k.conj())


def path_projector(a: ProjectorAngles, sign: int) -> np.ndarray:
    """Rank-1 projector on path space, basis ``(|I>, |II>)``."""
    return _projector(a, sign)


def spin_projector(b: ProjectorAngles, sign: int) -> np.ndarray:
    """Rank-1 projector on spin space, basis ``(|up>, |down>)``."""
    return _projector(b, sign)


def observable(a: ProjectorAngles) -> np.ndarray:
    return _projector(a, 1) - _projector(a, -1)


def expectation_analytic(a: ProjectorAngles, b: ProjectorAngles, gamma: float) -> float:
    return (math.cos(a.polar) * math.cos(b.polar)
            + math.cos(a.azimuthal + b.azimuthal - gamma) * math.sin(a.polar) * math.sin(b.polar))


def expectation_contraction(a: ProjectorAngles, b: ProjectorAngles,
                            state: SpinPathState) -> float:
    """``<psi| A (x) B |psi>`` by explicit 4x4 contraction."""
    psi = state.amplitudes
    return float(np.real(psi.conj() @ np.kron(observable(a), observable(b)) @ psi))


def expectation_from_counts(c: CountRates) -> float:
    if c.total <= 0:
        raise EmptyCounts("no counts in any channel")
    return (c.n_pp - c.n_pm - c.n_mp + c.n_mm) / c.total


def channel_probabilities(a: ProjectorAngles, b: ProjectorAngles, gamma: float) -> np.ndarray:
    """Joint outcome probabilities ``[p++, p+-, p-+, p--]``.

    The minus outcomes are measured as plus outcomes along the direction
    with polar angle shifted by pi, as done with the physical analyzers.
    """
    psi = build_entangled_state(0.0, gamma).amplitudes
    probs = []
    for pa in (a, a.flipped()):
        for pb in (b, b.flipped()):
            op = np.kron(path_projector(pa, 1), spin_projector(pb, 1))
            probs.append(float(np.real(psi.conj() @ op @ psi)))
    return np.array(probs)


def simulate_counts(a: ProjectorAngles, b: ProjectorAngles, gamma: float, total: int = 0,
                    seed=None, noise: Literal["multinomial", "poisson"] = "multinomial",
                    rng: np.random.Generator | None = None) -> CountRates:
    """Joint count rates for one pair of settings.

    ``total = 0`` is analytic mode and returns the exact probabilities.
    Otherwise ``total`` neutrons are distributed multinomially over the four
    channels, or each channel is drawn Poisson with mean ``total * p``.
    """
    if total < 0:
        raise ValueError("total must be non-negative")
    # contraction round-off can leave a vanishing channel at -1e-17
    p = np.clip(channel_probabilities(a, b, gamma), 0.0, None)
    if total == 0:
        return CountRates(*p)
    rng = rng if rng is not None else np.random.default_rng(seed)
    p = p / p.sum()
    if noise == "multinomial":
        n = rng.multinomial(total, p)
    elif noise == "poisson":
        n = rng.poisson(total * p)
    else:
        raise ValueError(f"unknown noise mode {noise!r}")
    return CountRates(*(float(x) for x in n))


def chsh_combination(e_ab, e_abp, e_apb, e_apbp) -> float:
    """Signed CHSH sum ``E(a,b) - E(a,b') + E(a',b) + E(a',b')``."""
    return e_ab - e_abp + e_apb + e_apbp


def s_value(setting: BellSetting, gamma: float) -> float:
    return abs(chsh_combination(*(expectation_analytic(a, b, gamma)
                                  for a, b, _ in setting.pairs())))


def s_from_counts(counts) -> float:
    """S from four CountRates in CHSH order (ab, ab', a'b, a'b')."""
    if len(counts) != 4:
        raise ValueError("need four CountRates")
    return abs(chsh_combination(*(expectation_from_counts(c) for c in counts)))


def simulate_s(setting: BellSetting, gamma: float, total: int = 0, seed=None,
               noise: Literal["multinomial", "poisson"] = "multinomial") -> float:
    """S from simulated counts; each setting pair gets its own ``total`` neutrons."""
    rng = np.random.default_rng(seed)
    counts = [simulate_counts(a, b, gamma, total, noise=noise, rng=rng)
              for a, b, _ in setting.pairs()]
    return s_from_counts(counts)


def s_standard(gamma: float) -> float:
    return abs(-SQRT2 - SQRT2 * math.cos(gamma))


def s_reduced(alpha_p: ProjectorAngles, beta: ProjectorAngles, beta_p: ProjectorAngles,
              gamma: float) -> float:
    """S with the first path direction fixed at ``alpha = (0, 0)``."""
    sa, ca = math.sin(alpha_p.polar), math.cos(alpha_p.polar)
    b1, b1p = beta.polar, beta_p.polar
    return abs(
        -sa * (math.cos(alpha_p.azimuthal + beta.azimuthal - gamma) * math.sin(b1)
               + math.cos(alpha_p.azimuthal + beta_p.azimuthal - gamma) * math.sin(b1p))
        - ca * (math.cos(b1) + math.cos(b1p))
        - math.cos(b1) + math.cos(b1p)
    )


def s_polar_fixed(beta1: float, beta1_p: float, gamma: float,
                  alpha1_p: float = math.pi / 2) -> float:
    """S with all azimuths zero and ``alpha = 0``."""
    c = math.cos(gamma)
    return abs(-math.sin(alpha1_p) * (c * math.sin(beta1) + c * math.sin(beta1_p))
               - math.cos(alpha1_p) * (math.cos(beta1) + math.cos(beta1_p))
               - math.cos(beta1) + math.cos(beta1_p))


def _polar_setting(beta1: float, beta1_p: float) -> BellSetting:
    return BellSetting(ProjectorAngles(0.0), ProjectorAngles(math.pi / 2),
                       ProjectorAngles(beta1), ProjectorAngles(beta1_p))


def polar_adjust(gamma: float) -> AdjustmentResult:
    """Closed-form spin polar angles that maximize S at fixed azimuths."""
    b1 = math.atan(math.cos(gamma))
    setting = _polar_setting(b1, math.pi - b1)
    return AdjustmentResult(setting, s_value(setting, gamma), "polar")


def polar_s_max(gamma: float) -> float:
    """Closed-form maximum of the polar-adjusted S, ``2 sqrt(1 + cos^2 gamma)``."""
    return 2.0 * math.sqrt(1.0 + math.cos(gamma) ** 2)


def numerical_polar_max(gamma: float, grid: int = 129, tol: float = 1e-10,
                        max_iter: int = 2000) -> AdjustmentResult:
    """Maximize S over ``(beta1, beta1')`` by grid search then Nelder-Mead.

    Flipping both spin directions (``beta -> beta + pi``) leaves S
    unchanged, so ``beta1`` is searched over one half period
    ``[-pi/2, pi/2)`` and ``beta1'`` over a full period starting at -pi/2.
    """
    def neg_s(x):
        return -s_value(_polar_setting(x[0], x[1]), gamma)

    b1 = np.linspace(-math.pi / 2, math.pi / 2, grid, endpoint=False)
    b1p = np.linspace(-math.pi / 2, 3 * math.pi / 2, grid, endpoint=False)
    best = min(((neg_s((x, y)), x, y) for x in b1 for y in b1p))
    res = minimize(neg_s, x0=np.array(best[1:]), method="Nelder-Mead",
                   options={"xatol": tol, "fatol": tol * 1e-4, "maxiter": max_iter})
    if not res.success or -res.fun < -best[0] - 1e-15:
        raise OptimizerStall(f"Nelder-Mead did not converge: {res.message}")
    setting = _polar_setting(float(res.x[0]), float(res.x[1]))
    return AdjustmentResult(setting, s_value(setting, gamma), "polar")


def azimuthal_adjust(gamma: float) -> AdjustmentResult:
    """Keep the Bell polar angles and rotate ``alpha'`` by ``gamma`` in azimuth.

    The representative of ``alpha'_2`` is taken in [0, 2 pi).
    """
    std = BellSetting.standard()
    a2 = gamma % (2 * math.pi)
    setting = replace(std, alpha_p=ProjectorAngles(math.pi / 2, a2))
    return AdjustmentResult(setting, s_value(setting, gamma), "azimuthal")


def uncorrected(gamma: float) -> AdjustmentResult:
    std = BellSetting.standard()
    return AdjustmentResult(std, s_value(std, gamma), "none")
