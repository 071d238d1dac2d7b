"""Spin-1/2 algebra: SU(2) evolutions, phase functionals, mixed-state phase.

Basis ordering is always ``(up, down)``. Density operators are built from
Bloch vectors as ``rho = (1 + r . sigma) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedPhase

TWO_PI = 2.0 * math.pi
# below this an overlap is treated as zero and its argument as undefined
PHASE_EPS = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def wrap_angle(a: float) -> float:
    """Map an angle onto (-pi, pi]."""
    return float(a - TWO_PI * math.ceil((a - math.pi) / TWO_PI))


def angles_close(a: float, b: float, tol: float) -> bool:
    """Compare two angles modulo 2 pi."""
    return abs(wrap_angle(a - b)) <= tol


@dataclass(frozen=True)
class SpinState:
    amp_up: complex
    amp_down: complex

    def __post_init__(self):
        norm2 = abs(self.amp_up) ** 2 + abs(self.amp_down) ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"spin state not normalized: |psi|^2 = {norm2!r}")

    @classmethod
    def from_ket(cls, ket) -> "SpinState":
        ket = np.asarray(ket, dtype=complex)
        ket = ket / np.linalg.norm(ket)
        return cls(complex(ket[0]), complex(ket[1]))

    @property
    def ket(self) -> np.ndarray:
        return np.array([self.amp_up, self.amp_down], dtype=complex)

    def bloch(self) -> "BlochVector":
        return BlochVector.from_density(np.outer(self.ket, self.ket.conj()))


UP = SpinState(1.0 + 0j, 0j)
DOWN = SpinState(0j, 1.0 + 0j)


@dataclass(frozen=True)
class BlochVector:
    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        if self.purity > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector longer than 1: |r| = {self.purity!r}")

    @classmethod
    def along_z(cls, purity: float) -> "BlochVector":
        return cls(0.0, 0.0, float(purity))

    @classmethod
    def from_density(cls, rho) -> "BlochVector":
        rho = np.asarray(rho, dtype=complex)
        return cls(*(float(np.real(np.trace(rho @ s))) for s in PAULI))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz])

    @property
    def purity(self) -> float:
        return math.sqrt(self.rx**2 + self.ry**2 + self.rz**2)

    def density_matrix(self) -> np.ndarray:
        return 0.5 * (IDENTITY + self.rx * SIGMA_X + self.ry * SIGMA_Y + self.rz * SIGMA_Z)


@dataclass(frozen=True)
class Su2Params:
    """Angles ``(xi, delta, zeta)`` of the general SU(2) evolution.

    All three are stored wrapped onto (-pi, pi].
    """

    xi: float
    delta: float
    zeta: float = 0.0

    def __post_init__(self):
        for name in ("xi", "delta", "zeta"):
            object.__setattr__(self, name, wrap_angle(float(getattr(self, name))))


@dataclass(frozen=True)
class PhaseDecomposition:
    total: float
    dynamical: float
    geometric: float


def is_unitary(u, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    return bool(
        np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0, atol=tol)
        and abs(abs(np.linalg.det(u)) - 1.0) <= tol
    )


def dagger(u) -> np.ndarray:
    return np.asarray(u).conj().T


def su2_from_params(p: Su2Params) -> np.ndarray:
    """Matrix of the general evolution in the (up, down) basis.

    >>> np.allclose(su2_from_params(Su2Params(0, 0, 0)), np.eye(2))
    True
    """
    c, s = math.cos(p.xi), math.sin(p.xi)
    return np.array(
        [
            [np.exp(1j * p.delta) * c, -np.exp(-1j * p.zeta) * s],
            [np.exp(1j * p.zeta) * s, np.exp(-1j * p.delta) * c],
        ],
        dtype=complex,
    )


def rotation(axis, angle: float) -> np.ndarray:
    """Spin rotation ``exp(-i angle n.sigma / 2)`` about the unit vector ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    ns = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    return math.cos(angle / 2) * IDENTITY - 1j * math.sin(angle / 2) * ns


def _checked_arg(z: complex) -> float:
    if abs(z) < PHASE_EPS:
        raise UndefinedPhase(f"overlap {z!r} vanishes; phase undefined")
    return wrap_angle(math.atan2(z.imag, z.real))


def total_phase(u) -> float:
    """Pancharatnam phase ``arg <up|U|up>`` of an evolution."""
    return _checked_arg(complex(np.asarray(u)[0, 0]))


def decompose_phase(p: Su2Params) -> PhaseDecomposition:
    """Split the total phase ``delta`` into dynamical and geometric parts.

    The geometric part is ``delta (1 - cos 2 xi)``, the dynamical part
    ``delta cos 2 xi``. Each is wrapped separately, so the sum identity holds
    modulo 2 pi.
    """
    c2 = math.cos(2 * p.xi)
    return PhaseDecomposition(
        total=wrap_angle(p.delta),
        dynamical=wrap_angle(p.delta * c2),
        geometric=wrap_angle(p.delta * (1.0 - c2)),
    )


def evolution_path(p: Su2Params, npts: int = 200_001) -> np.ndarray:
    """Bloch-sphere trajectory of ``|up>`` under a realization of ``U(p)``.

    The evolution is realized as a tilt about a transverse axis (polar
    angle 0 -> 2 xi along a meridian, no dynamical phase) followed by a
    precession about z through azimuth ``-2 delta``. The product reproduces
    ``U(p)|up>`` up to a phase on the down component that only depends on
    ``zeta``; this realization carries dynamical phase ``delta cos 2 xi``.

    Returns an ``(n, 3)`` array of unit vectors, tilt leg first.
    """
    if npts < 2:
        raise ValueError("need at least two samples on the precession leg")
    theta = 2.0 * p.xi
    phi0 = p.zeta + p.delta
    # the tilt is a meridian, hence a single geodesic leg; sample it coarsely
    # so that no chord spans half a great circle
    tilt = np.linspace(0.0, theta, 9)
    legs = [np.column_stack([np.sin(tilt) * math.cos(phi0),
                             np.sin(tilt) * math.sin(phi0),
                             np.cos(tilt)])]
    az = phi0 - np.linspace(0.0, 2.0 * p.delta, npts)
    legs.append(np.column_stack([np.full_like(az, math.sin(theta)) * np.cos(az),
                                 math.sin(theta) * np.sin(az),
                                 np.full_like(az, math.cos(theta))]))
    return np.vstack([legs[0], legs[1][1:]])


def mixed_phase_general(rho: BlochVector, u) -> tuple[float, float]:
    """Mixed-state phase ``arg Tr(rho U)`` and visibility ``|Tr(rho U)|``."""
    z = complex(np.trace(rho.density_matrix() @ np.asarray(u, dtype=complex)))
    if abs(z) < PHASE_EPS:
        raise UndefinedPhase(f"Tr(rho U) = {z!r}; visibility vanishes")
    return wrap_angle(math.atan2(z.imag, z.real)), abs(z)


def mixed_phase_theory(purity: float, delta: float) -> float:
    """Closed-form mixed-state phase for a beam polarized along z.

    Equals ``arctan(purity * tan(delta))`` on the principal branch but is
    evaluated with ``atan2`` so it stays continuous through delta = pi/2.
    """
    if not 0.0 <= purity <= 1.0:
        raise ValueError(f"purity must lie in [0, 1], got {purity!r}")
    y, x = purity * math.sin(delta), math.cos(delta)
    if math.hypot(x, y) < PHASE_EPS:
        raise UndefinedPhase("maximally mixed input with cos(delta) = 0")
    return wrap_angle(math.atan2(y, x))
