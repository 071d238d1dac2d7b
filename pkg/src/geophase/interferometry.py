"""Spin-path interferometer with rf spin flippers.

Basis of the 4-dim path (x) spin space: ``|I,up>, |I,down>, |II,up>, |II,down>``.
The rf interaction is treated in the rotating frame as a parameterized
pi-flip whose axis azimuth is the field phase; the time dependence of the
lab frame only enters :func:`time_dependence_residual`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np
import scipy.constants as const

from .fitting import fit_cosine
from .sphere import SpherePath
from .spin import IDENTITY, rotation, wrap_angle

NEUTRON_MAGNETIC_MOMENT = const.physical_constants["neutron mag. mom."][0]  # J/T, negative
HBAR = const.hbar

PATH_I = np.array([1.0, 0.0], dtype=complex)
PATH_II = np.array([0.0, 1.0], dtype=complex)
SPIN_UP = np.array([1.0, 0.0], dtype=complex)
SPIN_DOWN = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class RfFlipperConfig:
    b0: float  # static guide field, T
    tau: float  # time spent in the rf field, s
    phi: float = 0.0  # rf phase, rad
    mu: float = NEUTRON_MAGNETIC_MOMENT
    hbar: float = HBAR

    def __post_init__(self):
        if self.b0 <= 0 or self.tau <= 0:
            raise ValueError("b0 and tau must be positive")


class Resonance(NamedTuple):
    b_rf: float  # T
    omega: float  # rad/s
    bloch_siegert: float  # multiplicative frequency correction


def resonance(cfg: RfFlipperConfig) -> Resonance:
    """Amplitude and frequency resonance conditions of an rf pi-flipper.

    The frequency includes the Bloch-Siegert factor ``1 + B1^2 / (16 B0^2)``
    with ``B1`` the rf amplitude.
    """
    mu = abs(cfg.mu)
    b_rf = math.pi * cfg.hbar / (cfg.tau * mu)
    bs = 1.0 + b_rf**2 / (16.0 * cfg.b0**2)
    omega = 2.0 * mu * cfg.b0 / cfg.hbar * bs
    return Resonance(b_rf, omega, bs)


def rf_flip(phi: float) -> np.ndarray:
    """Rotating-frame pi flip: ``|up> -> e^{i phi}|down>``, ``|down> -> e^{-i phi}|up>``.

    Equals ``n.sigma`` for the transverse axis ``n = (cos phi, sin phi, 0)``.
    """
    return np.array([[0.0, np.exp(-1j * phi)], [np.exp(1j * phi), 0.0]], dtype=complex)


def geometric_phase_of_flip_pair(phi_I: float, phi_0: float = 0.0) -> float:
    """Geometric phase of flipping with phase ``phi_0`` undone and redone with ``phi_I``."""
    return wrap_angle(phi_I - phi_0)


def _rotate(v: np.ndarray, axis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    # Rodrigues rotation of a single vector through many angles
    c, s = np.cos(angles)[:, None], np.sin(angles)[:, None]
    return v * c + np.cross(axis, v) * s + axis * (axis @ v) * (1 - c)


def flip_trajectory(phi: float, npts: int = 33) -> np.ndarray:
    """Bloch vectors of ``|up>`` during the flip about azimuth ``phi``, up to down."""
    axis = np.array([math.cos(phi), math.sin(phi), 0.0])
    return _rotate(np.array([0.0, 0.0, 1.0]), axis, np.linspace(0.0, math.pi, npts))


def flip_pair_path(phi_I: float, phi_0: float = 0.0, npts: int = 33) -> SpherePath:
    """Closed loop traced by ``|down>`` under ``U(phi_I) U(phi_0)^dagger``.

    The reference flip is retraced backwards (down -> up), then the flip
    with phase ``phi_I`` carries the state back down. The two legs are
    half great circles meeting at the poles with opening angle
    ``phi_I - phi_0``.
    """
    back = flip_trajectory(phi_0, npts)[::-1]
    forth = flip_trajectory(phi_I, npts)
    return SpherePath(np.vstack([back, forth[1:]]))


@dataclass(frozen=True)
class SpinPathState:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(4)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"spin-path state not normalized: |psi| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``[path, spin]``."""
        return self.amplitudes.reshape(2, 2)

    def reduced_path(self) -> np.ndarray:
        m = self.as_matrix()
        return m @ m.conj().T

    def reduced_spin(self) -> np.ndarray:
        m = self.as_matrix()
        return m.T @ m.conj()


def build_entangled_state(chi: float, gamma: float) -> SpinPathState:
    """``(|I,up> + e^{i chi} e^{i gamma} |II,down>) / sqrt 2``."""
    amps = np.zeros(4, dtype=complex)
    amps[0] = 1.0
    amps[3] = np.exp(1j * (chi + gamma))
    return SpinPathState(amps / math.sqrt(2.0))


def _o_beam_after_second_flipper(t, omega, T, chi, phi_I, phi_II, second_flipper):
    # spin amplitudes per path at the second flipper, lab frame
    s_I = SPIN_UP.copy()
    s_II = np.exp(1j * (omega * t + chi + phi_I)) * SPIN_DOWN
    if second_flipper:
        u2 = rf_flip(0.5 * omega * (t + T) + phi_II)
        s_I, s_II = u2 @ s_I, u2 @ s_II
    return np.concatenate([s_I, s_II]) / math.sqrt(2.0)


def time_dependence_residual(t_grid, omega: float, T: float, *, second_flipper: bool = True,
                             chi: float = 0.0, phi_I: float = 0.0, phi_II: float = 0.0) -> float:
    """Largest deviation of the O-beam state from its time average.

    The state is evolved through the omega/2 flipper at each arrival time
    ``t`` in ``t_grid``; the global phase is fixed by making the path-I
    amplitude real and positive, and the constant ``e^{i omega T}`` offset
    between the paths is divided out. A time-independent state gives 0.
    """
    if omega < 0:
        raise ValueError("omega must be non-negative")
    states = []
    for t in np.asarray(t_grid, dtype=float):
        psi = _o_beam_after_second_flipper(t, omega, T, chi, phi_I, phi_II, second_flipper)
        # path-I spinor is a single basis state; its phase is the global phase
        ref = psi[np.argmax(np.abs(psi[:2]))]
        psi = psi * (abs(ref) / ref)
        if second_flipper:
            psi[2:] *= np.exp(1j * omega * T)
        states.append(psi)
    states = np.array(states)
    mean = states.mean(axis=0)
    return float(np.max(np.linalg.norm(states - mean, axis=1)))


@dataclass(frozen=True)
class InterferometerScan:
    chi_grid: np.ndarray = field(
        default_factory=lambda: np.linspace(0.0, 2 * math.pi, 24, endpoint=False)
    )
    phi_I: float = 0.0
    phi_II: float = 0.0
    initial_polarization: Literal["up", "down"] = "up"
    analysis_delta: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "chi_grid", np.asarray(self.chi_grid, dtype=float))
        if self.initial_polarization not in ("up", "down"):
            raise ValueError("initial_polarization must be 'up' or 'down'")

    @property
    def sign(self) -> int:
        return 1 if self.initial_polarization == "up" else -1

    @property
    def gamma(self) -> float:
        """Signed geometric phase seen in the O-beam."""
        return self.sign * (self.phi_I - 2.0 * self.phi_II)


def spin_turner(delta: float) -> np.ndarray:
    """Static rotation in the x-z plane taking +x towards +z by ``delta``."""
    return rotation([0.0, 1.0, 0.0], -delta)


def o_beam_intensity(scan: InterferometerScan, chi: float) -> float:
    """O-beam count probability after spin turner and up-analyzer.

    ``(1 + sin(delta) cos(chi + gamma)) / 4`` with ``gamma`` the signed
    geometric phase; at the default ``delta = pi/2`` the contrast is 1.
    """
    return 0.25 * (1.0 + math.sin(scan.analysis_delta) * math.cos(chi + scan.gamma))


def o_beam_intensity_matrix(scan: InterferometerScan, chi: float) -> float:
    """Same observable via explicit 4x4 operators; oracle for the closed form."""
    s0 = SPIN_UP if scan.initial_polarization == "up" else SPIN_DOWN
    path = (PATH_I + np.exp(1j * chi) * PATH_II) / math.sqrt(2.0)
    psi = np.kron(path, s0)
    p_I = np.outer(PATH_I, PATH_I.conj())
    p_II = np.outer(PATH_II, PATH_II.conj())
    flip_in_II = np.kron(p_I, IDENTITY) + np.kron(p_II, rf_flip(scan.phi_I))
    flip_both = np.kron(np.eye(2), rf_flip(scan.phi_II))
    psi = flip_both @ flip_in_II @ psi
    o_beam = (PATH_I + PATH_II) / math.sqrt(2.0)
    analyzer = np.kron(o_beam, spin_turner(scan.analysis_delta).conj().T @ SPIN_UP)
    amp = analyzer.conj() @ psi
    return float(abs(amp) ** 2)


def interferogram(scan: InterferometerScan, counts: float | None = None, rng=None) -> np.ndarray:
    """Rows ``(chi, intensity)``; with ``counts`` the intensities are Poisson draws."""
    chi = scan.chi_grid
    y = np.array([o_beam_intensity(scan, c) for c in chi])
    if counts is not None:
        rng = rng if rng is not None else np.random.default_rng()
        y = rng.poisson(counts * y).astype(float)
    return np.column_stack([chi, y])


def fringe_phase(chi, intensity, poisson: bool = False) -> float:
    """Phase shift ``Delta`` of a fringe ``a + b cos(chi + Delta)``."""
    fit = fit_cosine(chi, intensity, variance=intensity if poisson else None)
    return wrap_angle(-fit.phase)


def fringe_contrast(chi, intensity) -> float:
    fit = fit_cosine(chi, intensity)
    return fit.amplitude / fit.offset


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    phases: np.ndarray


def phase_slope(phi_I_values, scan: InterferometerScan, counts: float | None = None,
                rng=None) -> SlopeFit:
    """Fit fringe phase against ``phi_I``; ideal slope is +1 (up) or -1 (down)."""
    phi = np.asarray(phi_I_values, dtype=float)
    phases = []
    for val in phi:
        s = InterferometerScan(scan.chi_grid, float(val), scan.phi_II,
                               scan.initial_polarization, scan.analysis_delta)
        rows = interferogram(s, counts, rng)
        phases.append(fringe_phase(rows[:, 0], rows[:, 1], poisson=counts is not None))
    phases = np.unwrap(np.array(phases))
    slope, intercept = np.polyfit(phi, phases, 1)
    return SlopeFit(float(slope), float(intercept), phases)

